"""Coupling envelopes for the pulsed two-level problem.

Everything here is dimensionless: time is the scaled variable tau = t/T0 and
all frequencies enter only through the products T0*Omega and T0*Delta.  A
PulseShape evaluates T0*Omega(tau) exactly (value, analytic derivatives,
running area) for the envelope families used throughout the package:

    power_rise        Omega0 * (tau - tau_start)^n        (zero before onset)
    power_fall        Omega0 * (tau_end - tau)^n          (zero after the end)
    exponential       Omega0 * exp(+/- tau)
    gaussian          Omega0 * exp(-tau^2)
    sech              Omega0 / cosh(tau)
    trig_power        Omega0 * sin(tau)^n on [tau_start, tau_start + pi]
    linear_truncated  triangle with slope +/- Omega0 at the edges

Truncated kinds (power, trig, triangle) are exactly zero outside their
declared support.  Smooth kinds (exponential, gaussian, sech) follow their
closed form everywhere; their tau bounds only mark the integration window,
and `support` computes the numerical cutoff where the tail drops below a
configurable floor.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from scipy.integrate import quad

# Tail floor standing in for tau -> -inf on smooth envelopes: the support
# cutoff is placed where T0*Omega drops below this value.
DEFAULT_SUPPORT_EPS = 1e-8

# Relative tolerance requested from the adaptive-quadrature area fallback.
QUAD_RTOL = 1e-12


class Kind(enum.Enum):
    POWER_RISE = "power_rise"
    POWER_FALL = "power_fall"
    EXPONENTIAL = "exponential"
    GAUSSIAN = "gaussian"
    SECH = "sech"
    TRIG_POWER = "trig_power"
    LINEAR_TRUNCATED = "linear_truncated"


# Kinds whose envelope is exactly zero outside [tau_start, tau_end].
TRUNCATED_KINDS = frozenset(
    {Kind.POWER_RISE, Kind.POWER_FALL, Kind.TRIG_POWER, Kind.LINEAR_TRUNCATED}
)


@dataclass(frozen=True)
class PulseShape:
    """One coupling envelope T0*Omega(tau).

    Parameters
    ----------
    kind : Kind
        Envelope family.
    omega0 : float
        Dimensionless coefficient T0*Omega0.  Peak value for gaussian/sech,
        prefactor for power and trig shapes, edge slope for the triangle.
    tau_start, tau_end : float
        Declared support (may be +/-inf for smooth kinds).
    n : int
        Power for power_rise/power_fall/trig_power; ignored otherwise.
    sign : int
        Exponential only: +1 rising, -1 falling.
    """

    kind: Kind
    omega0: float
    tau_start: float
    tau_end: float
    n: int = 1
    sign: int = 1

    def __post_init__(self) -> None:
        if self.omega0 <= 0:
            raise ValueError(f"omega0 must be positive, got {self.omega0}")
        if self.tau_start > self.tau_end:
            raise ValueError("tau_start must not exceed tau_end")
        if self.kind in (Kind.POWER_RISE, Kind.POWER_FALL, Kind.TRIG_POWER):
            if self.n < 1 or self.n != int(self.n):
                raise ValueError(f"power n must be an integer >= 1, got {self.n}")
        if self.kind is Kind.EXPONENTIAL and self.sign not in (1, -1):
            raise ValueError(f"exponential sign must be +1 or -1, got {self.sign}")
        if self.kind in TRUNCATED_KINDS:
            if not (math.isfinite(self.tau_start) and math.isfinite(self.tau_end)):
                raise ValueError(f"{self.kind.value} requires finite tau bounds")


@dataclass(frozen=True)
class SystemParams:
    """Dimensionless couplings of one scenario.

    t0_omega0 is T0*Omega0 (> 0), t0_delta0 is the constant scaled detuning
    T0*Delta0 (>= 0), and n is the power of the rising edge where relevant.
    """

    t0_omega0: float
    t0_delta0: float
    n: int = 1

    def __post_init__(self) -> None:
        if self.t0_omega0 <= 0:
            raise ValueError(f"t0_omega0 must be positive, got {self.t0_omega0}")
        if self.t0_delta0 < 0:
            raise ValueError(f"t0_delta0 must be >= 0, got {self.t0_delta0}")
        if self.n < 1 or self.n != int(self.n):
            raise ValueError(f"n must be an integer >= 1, got {self.n}")

    @property
    def omega(self) -> float:
        """Linear-edge lifting parameter T0*Delta0 / sqrt(2 T0*Omega0)."""
        return self.t0_delta0 / math.sqrt(2.0 * self.t0_omega0)

    @property
    def varpi(self) -> float:
        """Exponential-edge detuning parameter, just T0*Delta0."""
        return self.t0_delta0

    @property
    def alpha_n(self) -> float:
        """Large-detuning expansion parameter T0*Delta0 * (Delta0/Omega0)^(1/n)."""
        return self.t0_delta0 * (self.t0_delta0 / self.t0_omega0) ** (1.0 / self.n)


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------

def power_rise(n: int, omega0: float, tau_end: float, tau_start: float = 0.0) -> PulseShape:
    return PulseShape(Kind.POWER_RISE, omega0, tau_start, tau_end, n=n)


def power_fall(n: int, omega0: float, tau_start: float, tau_end: float = 0.0) -> PulseShape:
    return PulseShape(Kind.POWER_FALL, omega0, tau_start, tau_end, n=n)


def exponential(omega0: float, sign: int = 1,
                tau_start: float = -math.inf, tau_end: float = math.inf) -> PulseShape:
    return PulseShape(Kind.EXPONENTIAL, omega0, tau_start, tau_end, sign=sign)


def gaussian(omega0: float,
             tau_start: float = -math.inf, tau_end: float = math.inf) -> PulseShape:
    return PulseShape(Kind.GAUSSIAN, omega0, tau_start, tau_end)


def sech(omega0: float,
         tau_start: float = -math.inf, tau_end: float = math.inf) -> PulseShape:
    return PulseShape(Kind.SECH, omega0, tau_start, tau_end)


def trig_power(n: int, omega0: float, tau_start: float = 0.0) -> PulseShape:
    return PulseShape(Kind.TRIG_POWER, omega0, tau_start, tau_start + math.pi, n=n)


def linear_truncated(omega0: float, tau_start: float, tau_end: float) -> PulseShape:
    return PulseShape(Kind.LINEAR_TRUNCATED, omega0, tau_start, tau_end)


def shape_from_config(record: dict) -> PulseShape:
    """Build a PulseShape from a plain config mapping.

    Recognized keys: kind (required), t0_omega0 (required), n, sign,
    tau_start, tau_end.  Missing bounds default to the natural support of
    the kind (infinite for smooth shapes, [0, pi] for trig shapes).
    """
    try:
        kind = Kind(str(record["kind"]).strip().lower())
    except KeyError:
        raise ValueError("shape record is missing the 'kind' key") from None
    except ValueError:
        valid = ", ".join(k.value for k in Kind)
        raise ValueError(f"unknown shape kind {record['kind']!r}; expected one of {valid}") from None
    if "t0_omega0" not in record:
        raise ValueError("shape record is missing the 't0_omega0' key")
    omega0 = float(record["t0_omega0"])
    n = int(record.get("n", 1))
    sign = int(record.get("sign", 1))

    defaults = {
        Kind.POWER_RISE: (0.0, 1.0),
        Kind.POWER_FALL: (-1.0, 0.0),
        Kind.EXPONENTIAL: (-math.inf, math.inf),
        Kind.GAUSSIAN: (-math.inf, math.inf),
        Kind.SECH: (-math.inf, math.inf),
        Kind.TRIG_POWER: (0.0, math.pi),
        Kind.LINEAR_TRUNCATED: (0.0, 2.0),
    }
    lo, hi = defaults[kind]
    tau_start = float(record.get("tau_start", lo))
    tau_end = float(record.get("tau_end", hi))
    if kind is Kind.TRIG_POWER and "tau_end" not in record:
        tau_end = tau_start + math.pi
    return PulseShape(kind, omega0, tau_start, tau_end, n=n, sign=sign)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def rabi_at(shape: PulseShape, tau: float) -> float:
    """Evaluate T0*Omega(tau) for the given shape."""
    k = shape.kind
    if k in TRUNCATED_KINDS and not (shape.tau_start <= tau <= shape.tau_end):
        return 0.0
    if k is Kind.POWER_RISE:
        return shape.omega0 * (tau - shape.tau_start) ** shape.n
    if k is Kind.POWER_FALL:
        return shape.omega0 * (shape.tau_end - tau) ** shape.n
    if k is Kind.EXPONENTIAL:
        return shape.omega0 * math.exp(shape.sign * tau)
    if k is Kind.GAUSSIAN:
        return shape.omega0 * math.exp(-tau * tau)
    if k is Kind.SECH:
        return shape.omega0 / math.cosh(tau)
    if k is Kind.TRIG_POWER:
        return shape.omega0 * math.sin(tau - shape.tau_start) ** shape.n
    if k is Kind.LINEAR_TRUNCATED:
        mid = 0.5 * (shape.tau_start + shape.tau_end)
        if tau <= mid:
            return shape.omega0 * (tau - shape.tau_start)
        return shape.omega0 * (shape.tau_end - tau)
    raise AssertionError(f"unhandled kind {k}")


def envelope(shape: PulseShape):
    """Return a fast tau -> T0*Omega(tau) closure for integrator hot loops.

    Equivalent to functools.partial(rabi_at, shape) but with the kind
    dispatch and field lookups hoisted out of the per-step call.
    """
    k = shape.kind
    w0 = shape.omega0
    lo, hi = shape.tau_start, shape.tau_end
    if k is Kind.POWER_RISE:
        n = shape.n
        return lambda tau: w0 * (tau - lo) ** n if lo <= tau <= hi else 0.0
    if k is Kind.POWER_FALL:
        n = shape.n
        return lambda tau: w0 * (hi - tau) ** n if lo <= tau <= hi else 0.0
    if k is Kind.EXPONENTIAL:
        sign = shape.sign
        return lambda tau: w0 * math.exp(sign * tau)
    if k is Kind.GAUSSIAN:
        return lambda tau: w0 * math.exp(-tau * tau)
    if k is Kind.SECH:
        return lambda tau: w0 / math.cosh(tau)
    if k is Kind.TRIG_POWER:
        n = shape.n
        return lambda tau: w0 * math.sin(tau - lo) ** n if lo <= tau <= hi else 0.0
    if k is Kind.LINEAR_TRUNCATED:
        mid = 0.5 * (lo + hi)
        def tri(tau):
            if not lo <= tau <= hi:
                return 0.0
            return w0 * (tau - lo) if tau <= mid else w0 * (hi - tau)
        return tri
    raise AssertionError(f"unhandled kind {k}")


def rabi_derivative(shape: PulseShape, tau: float, order: int = 1) -> float:
    """Analytic d^order/dtau^order of the envelope.

    At support endpoints the one-sided limit toward the interior is used,
    so e.g. the rising power shape reports its full interior derivative at
    tau_start.  Raises ValueError for order > n+2 on power shapes, where
    higher derivatives are identically zero and serve no purpose.
    """
    if order < 1 or order != int(order):
        raise ValueError(f"order must be an integer >= 1, got {order}")
    k = shape.kind
    n = shape.n
    if k in (Kind.POWER_RISE, Kind.POWER_FALL) and order > n + 2:
        raise ValueError(f"order {order} exceeds n+2 = {n + 2} for power shapes")
    if k in TRUNCATED_KINDS and not (shape.tau_start <= tau <= shape.tau_end):
        return 0.0

    if k is Kind.POWER_RISE:
        if order > n:
            return 0.0
        fac = math.factorial(n) / math.factorial(n - order)
        return shape.omega0 * fac * (tau - shape.tau_start) ** (n - order)
    if k is Kind.POWER_FALL:
        if order > n:
            return 0.0
        fac = math.factorial(n) / math.factorial(n - order)
        return shape.omega0 * ((-1.0) ** order) * fac * (shape.tau_end - tau) ** (n - order)
    if k is Kind.EXPONENTIAL:
        return (shape.sign ** order) * shape.omega0 * math.exp(shape.sign * tau)
    if k is Kind.GAUSSIAN:
        # d^k/dtau^k exp(-tau^2) = (-1)^k H_k(tau) exp(-tau^2) with the
        # physicists' Hermite polynomials.
        h_prev, h = 1.0, 2.0 * tau
        for m in range(1, order):
            h_prev, h = h, 2.0 * tau * h - 2.0 * m * h_prev
        return shape.omega0 * ((-1.0) ** order) * h * math.exp(-tau * tau)
    if k is Kind.SECH:
        # d^k sech(tau) = sech(tau) * P_k(tanh(tau)) with the coefficient
        # recurrence P_{k+1} = (1 - t^2) P_k' - t P_k.
        coeffs = [1.0]  # P_0
        for _ in range(order):
            deriv = [m * c for m, c in enumerate(coeffs)][1:] or [0.0]
            # (1 - t^2) * deriv
            term1 = deriv + [0.0, 0.0]
            for m, c in enumerate(deriv):
                term1[m + 2] -= c
            # - t * coeffs
            term2 = [0.0] + [-c for c in coeffs]
            size = max(len(term1), len(term2))
            term1 += [0.0] * (size - len(term1))
            term2 += [0.0] * (size - len(term2))
            coeffs = [x + y for x, y in zip(term1, term2)]
        t = math.tanh(tau)
        poly = 0.0
        for c in reversed(coeffs):
            poly = poly * t + c
        return shape.omega0 * poly / math.cosh(tau)
    if k is Kind.TRIG_POWER:
        # sin^n u = (2i)^(-n) sum_k C(n,k) (-1)^k exp(i(n-2k)u); each term
        # differentiates to a factor (i(n-2k))^order.
        u = tau - shape.tau_start
        total = 0.0 + 0.0j
        pref = (2.0j) ** (-n)
        for m in range(n + 1):
            freq = n - 2 * m
            c = math.comb(n, m) * ((-1.0) ** m)
            total += pref * c * (1j * freq) ** order * complex(math.cos(freq * u), math.sin(freq * u))
        return shape.omega0 * total.real
    if k is Kind.LINEAR_TRUNCATED:
        if order >= 2:
            return 0.0
        mid = 0.5 * (shape.tau_start + shape.tau_end)
        return shape.omega0 if tau <= mid else -shape.omega0
    raise AssertionError(f"unhandled kind {k}")


# ---------------------------------------------------------------------------
# Areas
# ---------------------------------------------------------------------------

def _clip_to_support(shape: PulseShape, tau_a: float, tau_b: float) -> tuple[float, float]:
    if shape.kind in TRUNCATED_KINDS:
        lo = max(tau_a, shape.tau_start)
        hi = min(tau_b, shape.tau_end)
    else:
        lo, hi = tau_a, tau_b
    return lo, hi


def _trig_integral(n: int, a: float, b: float) -> float:
    # Definite integral of sin^n over [a, b] by the standard power reduction.
    if n == 0:
        return b - a
    if n == 1:
        return math.cos(a) - math.cos(b)
    boundary = (math.cos(a) * math.sin(a) ** (n - 1) - math.cos(b) * math.sin(b) ** (n - 1)) / n
    return boundary + (n - 1) / n * _trig_integral(n - 2, a, b)


def pulse_area(shape: PulseShape, tau_a: float, tau_b: float) -> float:
    """Running area T0 * integral of Omega over [tau_a, tau_b], closed form."""
    if tau_a > tau_b:
        raise ValueError("tau_a must not exceed tau_b")
    lo, hi = _clip_to_support(shape, tau_a, tau_b)
    if lo >= hi:
        return 0.0
    k = shape.kind
    w0 = shape.omega0
    n = shape.n
    if k is Kind.POWER_RISE:
        return w0 * ((hi - shape.tau_start) ** (n + 1) - (lo - shape.tau_start) ** (n + 1)) / (n + 1)
    if k is Kind.POWER_FALL:
        return w0 * ((shape.tau_end - lo) ** (n + 1) - (shape.tau_end - hi) ** (n + 1)) / (n + 1)
    if k is Kind.EXPONENTIAL:
        if shape.sign > 0:
            lo_v = math.exp(lo) if lo > -math.inf else 0.0
            return w0 * (math.exp(hi) - lo_v)
        hi_v = math.exp(-hi) if hi < math.inf else 0.0
        return w0 * (math.exp(-lo) - hi_v)
    if k is Kind.GAUSSIAN:
        return w0 * 0.5 * math.sqrt(math.pi) * (math.erf(hi) - math.erf(lo))
    if k is Kind.SECH:
        # antiderivative 2*atan(exp(tau)), the gudermannian up to a constant
        lo_v = 2.0 * math.atan(math.exp(lo)) if lo > -math.inf else 0.0
        hi_v = 2.0 * math.atan(math.exp(hi)) if hi < math.inf else math.pi
        return w0 * (hi_v - lo_v)
    if k is Kind.TRIG_POWER:
        return w0 * _trig_integral(n, lo - shape.tau_start, hi - shape.tau_start)
    if k is Kind.LINEAR_TRUNCATED:
        mid = 0.5 * (shape.tau_start + shape.tau_end)

        def ramp_up(x: float) -> float:
            return 0.5 * w0 * (x - shape.tau_start) ** 2

        def ramp_down(x: float) -> float:
            return ramp_up(mid) + 0.5 * w0 * ((mid - shape.tau_end) ** 2 - (x - shape.tau_end) ** 2)

        anti = lambda x: ramp_up(x) if x <= mid else ramp_down(x)
        return anti(hi) - anti(lo)
    raise AssertionError(f"unhandled kind {k}")


def area_by_quadrature(shape: PulseShape, tau_a: float, tau_b: float) -> float:
    """Adaptive-quadrature area, the slow verification route for pulse_area."""
    if tau_a > tau_b:
        raise ValueError("tau_a must not exceed tau_b")
    lo, hi = _clip_to_support(shape, tau_a, tau_b)
    if not math.isfinite(lo) or not math.isfinite(hi):
        s_lo, s_hi = support(shape)
        lo = max(lo, s_lo - 5.0)
        hi = min(hi, s_hi + 5.0)
    if lo >= hi:
        return 0.0
    breaks = []
    if shape.kind is Kind.LINEAR_TRUNCATED:
        breaks = [0.5 * (shape.tau_start + shape.tau_end)]
    val, _ = quad(lambda t: rabi_at(shape, t), lo, hi,
                  points=[b for b in breaks if lo < b < hi] or None,
                  epsabs=0.0, epsrel=QUAD_RTOL, limit=500)
    return val


def support(shape: PulseShape, eps: float = DEFAULT_SUPPORT_EPS) -> tuple[float, float]:
    """Effective support [tau_lo, tau_hi] of the envelope.

    Truncated kinds return their declared bounds.  Smooth kinds return the
    window where T0*Omega >= eps, intersected with the declared bounds, so
    that an infinite declared bound becomes a usable finite cutoff.
    """
    if shape.kind in TRUNCATED_KINDS:
        return shape.tau_start, shape.tau_end
    if eps <= 0 or eps >= shape.omega0:
        raise ValueError("eps must satisfy 0 < eps < omega0")
    if shape.kind is Kind.EXPONENTIAL:
        cut = math.log(eps / shape.omega0)  # negative
        if shape.sign > 0:
            lo, hi = cut, math.inf
        else:
            lo, hi = -math.inf, -cut
    elif shape.kind is Kind.GAUSSIAN:
        half = math.sqrt(math.log(shape.omega0 / eps))
        lo, hi = -half, half
    elif shape.kind is Kind.SECH:
        half = math.acosh(shape.omega0 / eps)
        lo, hi = -half, half
    else:
        raise AssertionError(f"unhandled kind {shape.kind}")
    return max(lo, shape.tau_start), min(hi, shape.tau_end)
