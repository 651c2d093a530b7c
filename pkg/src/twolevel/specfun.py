"""Complex special functions backing the exact pulse solutions.

Validated wrappers around well-tested backends: principal-branch
log-Gamma and its argument (scipy), the real error function (libm), and
arbitrary-precision evaluation of the parabolic cylinder function
D_nu(z) and of Kummer's confluent hypergeometric function M(a, b, z)
(mpmath).  Conventions follow the DLMF: principal branch for log Gamma
(chapter 5), Whittaker's D_nu(z) = U(-nu - 1/2, z) (chapter 12), and
M(a, b, z) = 1F1(a; b; z) (chapter 13).

Phases of Gamma-function products are meant to be assembled from
``log_gamma(z).imag`` rather than from Gamma followed by arg, so that
large imaginary arguments never overflow the modulus.  ``arg_gamma``
folds that imaginary part into the principal interval (-pi, pi]; callers
that sweep a parameter unwrap the phase themselves.
"""

from __future__ import annotations

import math
import threading

import mpmath
from scipy.special import loggamma as _scipy_loggamma

__all__ = [
    "log_gamma",
    "arg_gamma",
    "erf",
    "parabolic_cylinder_D",
    "kummer_M",
]

_TWO_PI = 2.0 * math.pi

# Validated evaluation domains.  Inside these boxes the mpmath-backed
# functions were checked against ODE-integration oracles to better than
# 1e-9 relative (see the test suite); outside them we refuse to guess.
PCD_MAX_ORDER = 50.0
PCD_MAX_ARG = 50.0
KUMMER_MAX_PARAM = 50.0
KUMMER_MAX_ARG = 500.0

# Working precision for the mpmath backend.  40 digits leaves a wide
# margin over the 1e-9 contract even after internal cancellation.
_MP_DPS = 40

# mpmath precision state is process-global, so guard it for callers
# that evaluate from worker threads.
_mp_lock = threading.Lock()


def _as_finite_complex(name: str, value: complex) -> complex:
    z = complex(value)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return z


def _is_nonpositive_integer(z: complex) -> bool:
    return z.imag == 0.0 and z.real <= 0.0 and float(z.real).is_integer()


def log_gamma(z: complex) -> complex:
    """Principal branch of log Gamma(z) for complex z.

    Raises ValueError at the poles (z a non-positive integer).
    """
    z = _as_finite_complex("z", z)
    if _is_nonpositive_integer(z):
        raise ValueError(f"log_gamma pole at non-positive integer z = {z.real:g}")
    out = complex(_scipy_loggamma(z))
    if not (math.isfinite(out.real) and math.isfinite(out.imag)):
        raise ValueError(f"log_gamma produced a non-finite value at z = {z!r}")
    return out


def arg_gamma(z: complex) -> float:
    """Principal argument of Gamma(z), in (-pi, pi]."""
    a = math.remainder(log_gamma(z).imag, _TWO_PI)
    if a <= -math.pi:
        # remainder() can land exactly on the lower endpoint; fold it up.
        a += _TWO_PI
    return a


def erf(x: float) -> float:
    """Real error function erf(x)."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"x must be finite, got {x!r}")
    return math.erf(x)


def parabolic_cylinder_D(nu: complex, z: complex) -> complex:
    """Parabolic cylinder function D_nu(z), complex order and argument.

    Whittaker's normalization: D_nu(z) = U(-nu - 1/2, z), DLMF 12.1.
    Validated for |nu| <= 50 and |z| <= 50; arguments outside that box
    raise ValueError.
    """
    nu = _as_finite_complex("nu", nu)
    z = _as_finite_complex("z", z)
    if abs(nu) > PCD_MAX_ORDER or abs(z) > PCD_MAX_ARG:
        raise ValueError(
            "parabolic_cylinder_D outside validated domain "
            f"(|nu| <= {PCD_MAX_ORDER:g}, |z| <= {PCD_MAX_ARG:g}): "
            f"nu = {nu!r}, z = {z!r}"
        )
    with _mp_lock:
        with mpmath.workdps(_MP_DPS):
            val = mpmath.pcfd(mpmath.mpc(nu), mpmath.mpc(z))
            out = complex(val)
    return _as_finite_complex("parabolic_cylinder_D result", out)


def kummer_M(a: complex, b: complex, z: complex) -> complex:
    """Kummer's confluent hypergeometric function M(a, b, z) = 1F1(a; b; z).

    Raises ValueError when b is a non-positive integer (poles of M) or
    when the arguments leave the validated box |a|, |b| <= 50,
    |z| <= 500.
    """
    a = _as_finite_complex("a", a)
    b = _as_finite_complex("b", b)
    z = _as_finite_complex("z", z)
    if _is_nonpositive_integer(b):
        raise ValueError(f"kummer_M pole: b is a non-positive integer ({b.real:g})")
    if abs(a) > KUMMER_MAX_PARAM or abs(b) > KUMMER_MAX_PARAM or abs(z) > KUMMER_MAX_ARG:
        raise ValueError(
            "kummer_M outside validated domain "
            f"(|a|, |b| <= {KUMMER_MAX_PARAM:g}, |z| <= {KUMMER_MAX_ARG:g}): "
            f"a = {a!r}, b = {b!r}, z = {z!r}"
        )
    with _mp_lock:
        with mpmath.workdps(_MP_DPS):
            val = mpmath.hyp1f1(mpmath.mpc(a), mpmath.mpc(b), mpmath.mpc(z))
            out = complex(val)
    return _as_finite_complex("kummer_M result", out)
