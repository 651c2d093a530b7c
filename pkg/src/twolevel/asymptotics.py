"""Closed-form splitting amplitudes and perturbative transfer estimates.

Lifting of quasi-degeneracy by a rising coupling edge splits the initial
bare state into both adiabatic states.  This module evaluates that split
four independent ways:

    linear_lifting          exact asymptotics of the linear edge (half
                            Landau-Zener), populations and phases from
                            Gamma-function data, all functions of the single
                            parameter omega = T0*Delta0 / sqrt(2 T0*Omega0)
    exponential_lifting     exact asymptotics of the exponential edge,
                            populations from the detuning alone
    large_detuning_transfer first-order adiabatic perturbation theory for a
                            power edge: algebraic endpoint term S_n plus the
                            exponentially small residue sum I_n
    small_detuning_transfer first-order perturbation theory in the rotated
                            frame where the coupling is diagonal, for power,
                            exponential and gaussian edges
    universal_lifting       the linear-edge formulas with omega replaced by
                            omega_n, interpolating any power edge across the
                            whole detuning range

plus the exact finite-time evolution operators behind the first two
(`half_lz_exact` from parabolic cylinder functions, `exponential_exact` from
Kummer functions), which the integrator cross-checks at tight tolerances.

Phase conventions: every angle returned here is continuous in the sweep
parameter, anchored at the zero-detuning limit.  Gamma-function phases are
taken from the imaginary part of log_gamma (the analytic continuation),
never from wrapped principal values, so chi curves have no 2*pi seams.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

from scipy.integrate import quad

from .propagator import SU2Operator
from .pulses import Kind
from .specfun import kummer_M, log_gamma, parabolic_cylinder_D

_LN2 = math.log(2.0)
_SQRT_PI = math.sqrt(math.pi)

# Validity floor for the residue-sum estimate: below this the saddle
# approximation behind I_n degrades fast.
ALPHA_N_FLOOR = 3.0

# Soft-warning threshold for the exponential-edge asymptotics: the half-area
# reached must dominate the detuning scale.
ZETA_OVER_VARPI_MIN = 5.0

# Adiabaticity factor demanded by universal_lifting: 2 T0 sqrt(D^2 + W^2)
# must exceed n by at least this much.
UNIVERSAL_ADIABATICITY_FACTOR = 10.0


class RegimeError(ValueError):
    """Inputs lie outside the validity region of the requested formula."""


# ---------------------------------------------------------------------------
# Result types
# ---------------------------------------------------------------------------

class ModelKind(enum.Enum):
    LINEAR_EXACT = "linear_exact"
    EXPONENTIAL_EXACT = "exponential_exact"
    UNIVERSAL = "universal"
    LARGE_DETUNING = "large_detuning"
    SMALL_DETUNING = "small_detuning"


@dataclass(frozen=True)
class Model:
    """Which formula family produced a result (with its edge power, if any)."""

    kind: ModelKind
    n: int | None = None

    def __str__(self) -> str:
        if self.n is None:
            return self.kind.value
        return f"{self.kind.value}(n={self.n})"


@dataclass(frozen=True)
class LiftingResult:
    """Asymptotic splitting of the initial state over the adiabatic pair.

    The amplitudes are A_- = sqrt(p_minus) exp(+i(chi_minus + phase)) and
    A_+ = sqrt(p_plus) exp(-i(chi_plus + phase)), both times
    exp(i common_phase), where `phase` is the running phase accumulated
    after the split (dynamical phase for power edges, pulse half-area for
    the exponential edge); `amplitudes` applies it.

    p_minus + p_plus == 1.0 exactly by construction.  regime_warning is a
    human-readable flag set when the inputs sit at the edge of the formula's
    validity; the numbers are still the formula's honest output.
    """

    p_minus: float
    p_plus: float
    chi_minus: float
    chi_plus: float
    common_phase: float
    model: Model
    regime_warning: str | None = None

    def amplitudes(self, accumulated_phase: float = 0.0) -> tuple[complex, complex]:
        """(A_-, A_+) after further phase accumulation past the split."""
        a_minus = math.sqrt(self.p_minus) * cmath.exp(
            1j * (self.common_phase + self.chi_minus + accumulated_phase)
        )
        a_plus = math.sqrt(self.p_plus) * cmath.exp(
            -1j * (-self.common_phase + self.chi_plus + accumulated_phase)
        )
        return a_minus, a_plus


@dataclass(frozen=True)
class PerturbationTerms:
    """First-order large-detuning transfer for a power edge.

    j_n = s_n + i_n holds bitwise because j_n is defined as that sum.  i_n
    keeps the published residue-sum prefactor pi/3 verbatim; i_n_corrected
    replaces it by 1, which reproduces the exact linear-edge result (the
    pi/3 value is a known defect of the first-order treatment).  Both are
    carried so reports can show the discrepancy band.
    """

    n: int
    alpha_n: float
    b_n_const: float
    s_n: complex
    i_n: complex
    i_n_corrected: complex

    @property
    def j_n(self) -> complex:
        return self.s_n + self.i_n

    @property
    def j_n_corrected(self) -> complex:
        return self.s_n + self.i_n_corrected

    @property
    def p_plus(self) -> float:
        return abs(self.j_n) ** 2

    @property
    def p_plus_corrected(self) -> float:
        return abs(self.j_n_corrected) ** 2


@dataclass(frozen=True)
class SmallDetuningResult:
    """First-order small-detuning transfer.

    Amplitudes are the constant brackets multiplying exp(-+ i zeta(tau));
    the running half-area phase is left to the caller.  They exist only for
    power edges: for exponential and gaussian edges the quadrature-phase
    part of the first-order integral diverges and only the probability is
    defined, so a_minus/a_plus are None there.
    """

    kind: Kind
    n: int
    p_plus: float
    correction: float
    a_minus: complex | None = None
    a_plus: complex | None = None
    regime_warning: str | None = None

    @property
    def p_minus(self) -> float:
        return 1.0 - self.p_plus


# ---------------------------------------------------------------------------
# Shared pieces
# ---------------------------------------------------------------------------

def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value}")
    return value


def _require_power(n: int) -> int:
    if n != int(n) or int(n) < 1:
        raise ValueError(f"edge power n must be an integer >= 1, got {n}")
    return int(n)


def _splitting_pieces(omega: float) -> tuple[float, float, float, float]:
    """(phi, chi0, a, b) of the linear-edge asymptotics at parameter omega."""
    x = 0.25 * omega * omega
    arg_one = log_gamma(1.0 - 1j * x).imag
    arg_half = log_gamma(0.5 - 1j * x).imag
    phi = arg_one - arg_half + 0.25 * math.pi
    # x (1 - ln x) -> 0 as x -> 0; guard the ln singularity at exactly zero.
    chi0 = arg_half - (x * (1.0 - math.log(x)) if x > 0.0 else 0.0)
    a = math.sqrt(0.5 * (1.0 + math.exp(-2.0 * math.pi * x)))
    b = math.sqrt(0.5 * -math.expm1(-2.0 * math.pi * x))
    return phi, chi0, a, b


def _split_probabilities(omega: float, phi: float) -> tuple[float, float]:
    contrast = math.sqrt(-math.expm1(-math.pi * omega * omega)) * math.cos(phi)
    p_plus = 0.5 * (1.0 - contrast)
    return 1.0 - p_plus, p_plus


# ---------------------------------------------------------------------------
# Linear edge, exact
# ---------------------------------------------------------------------------

def linear_lifting(omega: float) -> LiftingResult:
    """Exact asymptotic splitting for a linearly rising coupling edge.

    omega is the single dimensionless parameter
    T0*Delta0 / sqrt(2 T0*Omega0).  Populations and phases follow the
    half-Landau-Zener closed forms; chi curves are continuous in omega with
    chi_plus(0) = chi_minus(0) = 0 and tend to -pi/2 and 0 as omega grows.
    """
    omega = _require_finite("omega", omega)
    if omega < 0.0:
        raise ValueError(f"omega must be >= 0, got {omega}")
    phi, chi0, a, b = _splitting_pieces(omega)
    p_minus, p_plus = _split_probabilities(omega, phi)
    plus_arg = complex(a - b * math.cos(phi), -b * math.sin(phi))
    minus_arg = complex(a + b * math.cos(phi), b * math.sin(phi))
    return LiftingResult(
        p_minus=p_minus,
        p_plus=p_plus,
        chi_minus=chi0 + cmath.phase(minus_arg),
        chi_plus=chi0 + cmath.phase(plus_arg),
        common_phase=0.0,
        model=Model(ModelKind.LINEAR_EXACT),
    )


def half_lz_exact(omega: float, t_big: float) -> SU2Operator:
    """Exact evolution operator of the half Landau-Zener problem.

    Works in the rotated frame where the coupling sits on the diagonal,
    in the stretched time T = sqrt(T0*Omega0/2) tau, starting from T = 0.
    Built from parabolic cylinder functions of imaginary order; range
    limits of the special-function layer apply.
    """
    omega = _require_finite("omega", omega)
    t_big = _require_finite("t_big", t_big)
    if omega < 0.0:
        raise ValueError(f"omega must be >= 0, got {omega}")
    if omega == 0.0:
        # Decoupled limit: purely diagonal phase evolution.
        return SU2Operator(cmath.exp(0.5j * t_big * t_big), 0.0j)
    x = 0.25 * omega * omega
    nu = 2j * x
    d_right = parabolic_cylinder_D(nu, complex(t_big, -t_big))
    d_left = parabolic_cylinder_D(nu, complex(-t_big, t_big))
    log_common = log_gamma(1.0 - 2j * x)
    c11 = cmath.exp(log_common - log_gamma(1.0 - 1j * x) + (-1.0 + 1j * x) * _LN2)
    c12 = cmath.exp(
        log_common - log_gamma(0.5 - 1j * x) + 1j * x * _LN2 + 0.25j * math.pi
    ) / omega
    return SU2Operator(c11 * (d_right + d_left), c12 * (d_right - d_left))


# ---------------------------------------------------------------------------
# Exponential edge, exact
# ---------------------------------------------------------------------------

def exponential_lifting(varpi: float, zeta: float, s_i: float) -> LiftingResult:
    """Exact asymptotic splitting for an exponentially rising edge.

    varpi = T0*Delta0, zeta = the dimensionless pulse half-area reached,
    s_i = the (small, positive) area at which the evolution clock starts.
    Populations depend on varpi alone; the whole split carries one common
    phase xi and no relative phase, and the running phase slot of the
    amplitudes is the half-area zeta rather than a dynamical phase.  s_i
    only shifts xi; it is recorded via the phase so results reproduce.
    """
    varpi = _require_finite("varpi", varpi)
    zeta = _require_finite("zeta", zeta)
    s_i = _require_finite("s_i", s_i)
    if varpi < 0.0:
        raise ValueError(f"varpi must be >= 0, got {varpi}")
    if s_i <= 0.0:
        raise ValueError(f"s_i must be positive, got {s_i}")
    if zeta <= 0.0:
        raise ValueError(f"zeta must be positive, got {zeta}")
    weight = math.exp(-math.pi * varpi)
    p_plus = weight / (1.0 + weight)
    xi = log_gamma(0.5 + 0.5j * varpi).imag + varpi * _LN2 - 0.5 * varpi * math.log(s_i)
    warning = None
    if zeta < ZETA_OVER_VARPI_MIN * varpi:
        warning = (
            f"half-area zeta = {zeta:g} is below {ZETA_OVER_VARPI_MIN:g}*varpi = "
            f"{ZETA_OVER_VARPI_MIN * varpi:g}; asymptotic split not yet settled"
        )
    return LiftingResult(
        p_minus=1.0 - p_plus,
        p_plus=p_plus,
        chi_minus=0.0,
        chi_plus=0.0,
        common_phase=xi,
        model=Model(ModelKind.EXPONENTIAL_EXACT),
        regime_warning=warning,
    )


def exponential_exact(varpi: float, s: float) -> SU2Operator:
    """Exact bare-frame evolution operator for the exponential edge.

    s is the running dimensionless pulse area T0*Omega0*exp(tau); the
    operator propagates from the s -> 0 limit with the oscillatory
    start-time phase factor divided out, so U(s_b) U(s_a)^dagger is the
    physical operator between two finite areas.  Built from the Kummer
    function solution and its derivative.
    """
    varpi = _require_finite("varpi", varpi)
    s = _require_finite("s", s)
    if varpi < 0.0:
        raise ValueError(f"varpi must be >= 0, got {varpi}")
    if s <= 0.0:
        raise ValueError(f"s must be positive, got {s}")
    if varpi == 0.0:
        # Resonant limit: plain pulse-area rotation.
        half = 0.5 * s
        return SU2Operator(complex(math.cos(half), 0.0), complex(0.0, -math.sin(half)))
    # b_minus solves the second-order area equation with b_minus -> s^{i varpi/2}
    # as s -> 0; b_plus follows from the first-order system.
    envelope_phase = cmath.exp(1j * (0.5 * varpi * math.log(s) - 0.5 * s))
    m_base = kummer_M(0.5j * varpi, 1j * varpi, 1j * s)
    m_shift = kummer_M(1.0 + 0.5j * varpi, 1.0 + 1j * varpi, 1j * s)
    b_minus = envelope_phase * m_base
    b_plus = envelope_phase * (m_base - m_shift)
    return SU2Operator(b_minus, -b_plus.conjugate())


# ---------------------------------------------------------------------------
# Large detuning: endpoint term plus residue sum
# ---------------------------------------------------------------------------

def residue_b_n(n: int) -> float:
    """The pole-location constant b_n = integral of sqrt(1 - x^(2n)) on [0,1]."""
    n = _require_power(n)
    return (
        _SQRT_PI / (4.0 * n)
        * math.exp(math.lgamma(0.5 / n) - math.lgamma((3.0 * n + 1.0) / (2.0 * n)))
    )


def large_detuning_transfer(
    n: int, alpha_n: float, enforce_floor: bool = True
) -> PerturbationTerms:
    """First-order transfer for a power edge at large detuning.

    alpha_n = T0*Delta0 * (Delta0/Omega0)^(1/n) must sit above the validity
    floor; below it the residue estimate has no accuracy left.  Returns the
    algebraic endpoint term s_n exactly, the residue sum i_n with the
    published pi/3 prefactor, and i_n_corrected with prefactor 1.  The
    transfer probability is |s_n + i_n|^2 via the j_n/p_plus properties.

    enforce_floor=False skips the floor gate so full comparison curves can
    show where the formula drifts off; alpha_n must still be positive.
    """
    n = _require_power(n)
    alpha_n = _require_finite("alpha_n", alpha_n)
    if alpha_n <= 0.0:
        raise ValueError(f"alpha_n must be positive, got {alpha_n}")
    if enforce_floor and alpha_n < ALPHA_N_FLOOR:
        raise RegimeError(
            f"alpha_n = {alpha_n:g} is below the validity floor {ALPHA_N_FLOOR:g}; "
            "the residue estimate is unreliable there"
        )
    b_n = residue_b_n(n)
    s_n = 0.5 * math.factorial(n) * (1j / alpha_n) ** n
    scale = alpha_n * b_n
    total = 0.0j
    for k in range(n // 2 if n % 2 == 0 else (n - 1) // 2):
        angle = math.pi / n * (k + 0.5)
        total += (-1.0) ** k * cmath.exp(
            scale * complex(-math.sin(angle), math.cos(angle))
        )
    if n % 2 == 1:
        total += 0.5 * (-1.0) ** ((n - 1) // 2) * math.exp(-scale)
    return PerturbationTerms(
        n=n,
        alpha_n=alpha_n,
        b_n_const=b_n,
        s_n=s_n,
        i_n=(math.pi / 3.0) * total,
        i_n_corrected=total,
    )


# ---------------------------------------------------------------------------
# Small detuning
# ---------------------------------------------------------------------------

def k_n_constant(n: int, t0_omega0: float) -> float:
    """Sine-quadrature constant of the power edge, closed Gamma form."""
    n = _require_power(n)
    if t0_omega0 <= 0.0:
        raise ValueError(f"t0_omega0 must be positive, got {t0_omega0}")
    half = 0.5 / (n + 1.0)
    return (
        (1.0 / t0_omega0) ** (1.0 / (n + 1.0))
        * _SQRT_PI / (2.0 * (n + 1.0)) ** (n / (n + 1.0))
        * math.exp(math.lgamma((n + 2.0) * half) - math.lgamma((2.0 * n + 1.0) * half))
    )


def l_n_constant(n: int, t0_omega0: float) -> float:
    """Cosine-quadrature companion of k_n_constant, closed Gamma form."""
    n = _require_power(n)
    if t0_omega0 <= 0.0:
        raise ValueError(f"t0_omega0 must be positive, got {t0_omega0}")
    half = 0.5 / (n + 1.0)
    return (
        (1.0 / t0_omega0) ** (1.0 / (n + 1.0))
        * _SQRT_PI / (2.0 * (n + 1.0)) ** (n / (n + 1.0))
        * math.exp(math.lgamma(half) - math.lgamma(n * half))
    )


def gaussian_G(x: float) -> float:
    """Transfer quadrature of the gaussian edge, evaluated at x = T0*Omega0.

    G(x) = integral over tau <= 0 of sin[(sqrt(pi)/2) x (1 + erf tau)],
    by adaptive quadrature cut where the integrand drops below 1e-12.
    Absolute accuracy 1e-8 or better.
    """
    x = _require_finite("x", x)
    if x < 0.0:
        raise ValueError(f"x must be >= 0, got {x}")
    if x == 0.0:
        return 0.0
    amplitude = 0.5 * _SQRT_PI * x
    tau_cut = -4.0
    while amplitude * math.erfc(-tau_cut) > 1e-12:
        tau_cut -= 0.5
    value, err = quad(
        lambda t: math.sin(amplitude * (1.0 + math.erf(t))),
        tau_cut,
        0.0,
        epsabs=1e-10,
        epsrel=1e-12,
        limit=2000,
    )
    if err > 1e-8:
        raise ArithmeticError(f"gaussian quadrature error estimate {err:.2e} too large")
    return value


_SMALL_DETUNING_KINDS = frozenset({Kind.POWER_RISE, Kind.EXPONENTIAL, Kind.GAUSSIAN})


def small_detuning_transfer(
    kind: Kind, n: int, t0_delta0: float, t0_omega0: float
) -> SmallDetuningResult:
    """First-order transfer at small detuning for one rising-edge family.

    Power edges get amplitudes and probability from the closed k_n/l_n
    constants; the exponential edge has the universal pi/2 factor and the
    gaussian edge the numerical quadrature G(T0*Omega0), both probability
    only.  A regime warning is set when the first-order correction
    T0*Delta0 * (quadrature constant) exceeds 0.5, where first order has
    clearly left its domain (the formula is still evaluated verbatim).
    """
    n = _require_power(n)
    t0_delta0 = _require_finite("t0_delta0", t0_delta0)
    t0_omega0 = _require_finite("t0_omega0", t0_omega0)
    if t0_delta0 < 0.0:
        raise ValueError(f"t0_delta0 must be >= 0, got {t0_delta0}")
    if t0_omega0 <= 0.0:
        raise ValueError(f"t0_omega0 must be positive, got {t0_omega0}")
    if kind not in _SMALL_DETUNING_KINDS:
        raise ValueError(
            f"no small-detuning formula for kind {kind.value!r}; expected one of "
            + ", ".join(sorted(k.value for k in _SMALL_DETUNING_KINDS))
        )
    a_minus = a_plus = None
    if kind is Kind.POWER_RISE:
        k_const = k_n_constant(n, t0_omega0)
        l_const = l_n_constant(n, t0_omega0)
        correction = t0_delta0 * k_const
        a_minus = (1.0 + 0.5 * t0_delta0 * complex(k_const, l_const)) / math.sqrt(2.0)
        a_plus = (1.0 + 0.5 * t0_delta0 * complex(-k_const, l_const)) / math.sqrt(2.0)
    elif kind is Kind.EXPONENTIAL:
        correction = t0_delta0 * 0.5 * math.pi
    else:
        correction = t0_delta0 * gaussian_G(t0_omega0)
    warning = None
    if correction > 0.5:
        warning = (
            f"first-order correction {correction:.3g} exceeds 0.5; "
            "outside the small-detuning regime"
        )
    return SmallDetuningResult(
        kind=kind,
        n=n,
        p_plus=0.5 * (1.0 - correction),
        correction=correction,
        a_minus=a_minus,
        a_plus=a_plus,
        regime_warning=warning,
    )


# ---------------------------------------------------------------------------
# Universal interpolation
# ---------------------------------------------------------------------------

def omega_n(n: int, t0_delta0: float, t0_omega0: float) -> float:
    """Generalized splitting parameter omega_n = sqrt(2/pi) K_n T0*Delta0.

    For n = 1 the Gamma factors cancel exactly and the expression reduces
    to T0*Delta0 / sqrt(2 T0*Omega0); that path is taken literally so the
    linear case is bit-for-bit the linear-edge parameter.
    """
    n = _require_power(n)
    if n == 1:
        return t0_delta0 / math.sqrt(2.0 * t0_omega0)
    return math.sqrt(2.0 / math.pi) * k_n_constant(n, t0_omega0) * t0_delta0


def universal_lifting(
    n: int,
    t0_delta0: float,
    t0_omega0: float,
    enforce_regime: bool = True,
) -> LiftingResult:
    """Any-detuning splitting estimate for a power edge of power n.

    Evaluates the linear-edge closed forms at omega_n, with two asymptotics
    -motivated phase adjustments: chi_minus picks up a sine-ratio factor on
    its Gamma part and chi_plus a factor n on its arithmetic part.  At
    n = 1 both adjustments are exactly neutral and the result is identical
    to linear_lifting.

    enforce_regime=False skips the adiabaticity gate; the lineshape
    composition needs the splitting quantities for weak pulses where the
    large-area condition, checked separately there, is the relevant one.
    """
    n = _require_power(n)
    t0_delta0 = _require_finite("t0_delta0", t0_delta0)
    t0_omega0 = _require_finite("t0_omega0", t0_omega0)
    if t0_delta0 < 0.0:
        raise ValueError(f"t0_delta0 must be >= 0, got {t0_delta0}")
    if t0_omega0 <= 0.0:
        raise ValueError(f"t0_omega0 must be positive, got {t0_omega0}")
    scale = 2.0 * math.hypot(t0_delta0, t0_omega0)
    if enforce_regime and scale < UNIVERSAL_ADIABATICITY_FACTOR * n:
        raise RegimeError(
            f"adiabaticity condition fails: 2*T0*sqrt(Delta0^2+Omega0^2) = {scale:g} "
            f"< {UNIVERSAL_ADIABATICITY_FACTOR:g}*n = {UNIVERSAL_ADIABATICITY_FACTOR * n:g}"
        )
    omega = omega_n(n, t0_delta0, t0_omega0)
    phi, chi0, a, b = _splitting_pieces(omega)
    p_minus, p_plus = _split_probabilities(omega, phi)
    plus_arg = complex(a - b * math.cos(phi), -b * math.sin(phi))
    minus_arg = complex(a + b * math.cos(phi), b * math.sin(phi))
    ratio = (
        math.sin(0.5 * math.pi * (2 * n + 1) / (n + 1))
        / math.sin(0.5 * math.pi * (n + 2) / (n + 1))
    )
    return LiftingResult(
        p_minus=p_minus,
        p_plus=p_plus,
        chi_minus=ratio * chi0 + cmath.phase(minus_arg),
        chi_plus=chi0 + n * cmath.phase(plus_arg),
        common_phase=0.0,
        model=Model(ModelKind.UNIVERSAL, n=n),
    )
