"""Full-pulse transfer amplitudes and two-pulse superposition sequences.

A large-area pulse factors into three stages: lifting of quasi-degeneracy
at the rising edge, adiabatic following along the plateau, creation of
quasi-degeneracy at the falling edge.  `composed_transfer` multiplies the
three operators out for truncated power-edge pulses (trig powers, the
triangle) and for the sech pulse; `rosen_zener` and `trig_lineshape` are
the closed forms those compositions collapse to.  `half_scrap` applies
the same edge analysis to the delayed two-pulse sequences that prepare
coherent superpositions, classified by their lifting direction on the
eigenenergy surfaces.

The bare amplitudes are always reported for the initial condition
B_-(tau_i) = 1, B_+(tau_i) = 0.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

from . import asymptotics as asy
from . import propagator as prop
from .propagator import SU2Operator
from .pulses import (
    Kind,
    PulseShape,
    SystemParams,
    TRUNCATED_KINDS,
    pulse_area,
    rabi_at,
    support,
    trig_power,
)
from .specfun import log_gamma

# Junction quality: gamma_tilde must be at or below this for the plateau
# to count as adiabatic.
DEFAULT_GAMMA_THRESHOLD = 0.01

# Hard floor on the pulse area for the three-stage composition.
MIN_AREA = 5.0

# Soft floor for the trig closed forms (a pi-pulse still works, flagged).
TRIG_AREA_FLAG = math.pi

_JUNCTION_SAMPLES = 801

# Shapes with a power-law ending on both sides, and the smooth one the
# composition also covers.
_POWER_ENDED = frozenset({Kind.TRIG_POWER, Kind.LINEAR_TRUNCATED})
_COMPOSED_KINDS = _POWER_ENDED | {Kind.SECH}

_PUMP_KINDS = frozenset({Kind.POWER_RISE, Kind.EXPONENTIAL, Kind.GAUSSIAN})


class AreaError(ValueError):
    """Pulse area too small for the three-stage decomposition."""


class JunctionError(ValueError):
    """No adiabatic junction: gamma_tilde exceeds the threshold."""


class Sequence(enum.Enum):
    STARK_PUMP = "stark_pump"
    PUMP_STARK = "pump_stark"


@dataclass(frozen=True)
class LineshapePoint:
    """Final bare amplitudes of one pulse at one detuning.

    p_transfer is |b_plus|^2.  area is the full pulse area.  The sech
    routes set b_minus_phase_approximate: the b_minus modulus is exact
    but its phase convention only holds for small detunings.
    """

    t0_delta0: float
    b_minus: complex
    b_plus: complex
    p_transfer: float
    area: float
    b_minus_phase_approximate: bool = False
    regime_warning: str | None = None


@dataclass(frozen=True)
class HalfScrapResult:
    """Superposition prepared by one delayed two-pulse sequence.

    relative_phase is arg(amp_+) - arg(amp_-) of the final state, wrapped
    to [-pi, pi]; robust_phase says whether it is free of dynamical
    phases.  method is "analytic" when a closed lifting formula was used
    and "numeric" for the ODE route (Gaussian pump).
    """

    sequence: Sequence
    p_plus_final: float
    relative_phase: float
    robust_phase: bool
    method: str = "analytic"


def eigenenergy_surface(t0_omega: float, t0_delta: float) -> tuple[float, float]:
    """Adiabatic eigenenergies (lambda_minus, lambda_plus) in hbar = 1 units.

    The two surfaces over the (Omega, Delta) parameter plane; they touch
    only at the conical intersection (0, 0).
    """
    for name, value in (("t0_omega", t0_omega), ("t0_delta", t0_delta)):
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite, got {value}")
    half = 0.5 * math.hypot(t0_omega, t0_delta)
    return -half, half


# ---------------------------------------------------------------------------
# Junctions
# ---------------------------------------------------------------------------

def _gamma_tilde(params: SystemParams, shape: PulseShape, tau: float) -> float:
    gamma = prop.nonadiabatic_coupling(params, shape, tau)
    return abs(gamma) / (2.0 * math.hypot(params.t0_delta0, rabi_at(shape, tau)))


def _plateau_window(shape: PulseShape) -> tuple[float, float]:
    if shape.kind in TRUNCATED_KINDS:
        return shape.tau_start, shape.tau_end
    return support(shape)


def _find_junctions(
    params: SystemParams, shape: PulseShape, threshold: float
) -> tuple[float, float]:
    """Bounds of the adiabatic run around the pulse peak.

    The far tails can be quiet too (the detuning dominates there), so the
    contiguous gamma_tilde <= threshold stretch containing the coupling
    maximum is the one that counts; its ends are the junctions.
    """
    lo, hi = _plateau_window(shape)
    step = (hi - lo) / (_JUNCTION_SAMPLES + 1)
    taus = [lo + step * k for k in range(1, _JUNCTION_SAMPLES + 1)]
    values = [_gamma_tilde(params, shape, t) for t in taus]
    k_peak = max(range(len(taus)), key=lambda k: rabi_at(shape, taus[k]))
    if values[k_peak] > threshold:
        raise JunctionError(
            f"no adiabatic plateau: gamma_tilde = {values[k_peak]:.3e} at the "
            f"pulse peak exceeds {threshold:g}"
        )
    left = k_peak
    while left > 0 and values[left - 1] <= threshold:
        left -= 1
    right = k_peak
    while right < len(taus) - 1 and values[right + 1] <= threshold:
        right += 1
    if left == right:
        raise JunctionError(
            f"adiabatic plateau is a single sample at tau = {taus[k_peak]:g}; "
            f"gamma_tilde exceeds {threshold:g} on both sides"
        )
    return taus[left], taus[right]


def _check_junction(
    params: SystemParams, shape: PulseShape, tau: float, threshold: float, label: str
) -> None:
    lo, hi = _plateau_window(shape)
    if not lo < tau < hi:
        raise ValueError(f"{label} = {tau:g} lies outside the pulse ({lo:g}, {hi:g})")
    g = _gamma_tilde(params, shape, tau)
    if g > threshold:
        raise JunctionError(
            f"junction {label} = {tau:g} is not adiabatic: "
            f"gamma_tilde = {g:.3e} > {threshold:g}"
        )


# ---------------------------------------------------------------------------
# Edge operators
# ---------------------------------------------------------------------------

def _power_edge(lift: asy.LiftingResult, eta: float) -> SU2Operator:
    """Asymptotic rising-edge operator in the adiabatic basis.

    Column one is (sqrt(p-) e^{i(chi- + eta)}, sqrt(p+) e^{-i(chi+ + eta)})
    with eta the dynamical phase accumulated since the edge zero.
    """
    u11 = math.sqrt(lift.p_minus) * cmath.exp(1j * (lift.chi_minus + eta))
    u12 = -math.sqrt(lift.p_plus) * cmath.exp(1j * (lift.chi_plus + eta))
    return SU2Operator(u11, u12)


def _exponential_edge(p_minus: float, p_plus: float, xi: float, zeta: float) -> SU2Operator:
    # the exponential edge's natural phase variable is the half-area zeta
    u11 = math.sqrt(p_minus) * cmath.exp(1j * (xi + zeta))
    u12 = -math.sqrt(p_plus) * cmath.exp(-1j * (xi - zeta))
    return SU2Operator(u11, u12)


def _point_from_operator(
    u: SU2Operator,
    t0_delta0: float,
    area: float,
    approximate_minus: bool = False,
    warning: str | None = None,
) -> LineshapePoint:
    b_minus = u.u11
    b_plus = -u.u12.conjugate()
    return LineshapePoint(
        t0_delta0=t0_delta0,
        b_minus=b_minus,
        b_plus=b_plus,
        p_transfer=abs(b_plus) ** 2,
        area=area,
        b_minus_phase_approximate=approximate_minus,
        regime_warning=warning,
    )


# ---------------------------------------------------------------------------
# Composition
# ---------------------------------------------------------------------------

def composed_transfer(
    params: SystemParams,
    shape: PulseShape,
    tau_1: float | None = None,
    tau_2: float | None = None,
    gamma_threshold: float = DEFAULT_GAMMA_THRESHOLD,
    min_area: float = MIN_AREA,
) -> LineshapePoint:
    """Three-stage transfer amplitudes for one full pulse.

    Builds the lifting operator from the edge's asymptotic model, the
    plateau operator from the dynamical phase between the junctions
    tau_1 and tau_2 (located automatically where gamma_tilde falls to
    gamma_threshold when not given), and the creation operator as the
    time-reversed edge.  Supports trig-power and triangle pulses (power
    endings) and the sech pulse (exponential endings).

    Raises AreaError below min_area and JunctionError when a junction
    sits in a nonadiabatic region.  min_area can be lowered consciously;
    the default matches the large-area premise of the decomposition.
    """
    if shape.kind not in _COMPOSED_KINDS:
        supported = ", ".join(sorted(k.value for k in _COMPOSED_KINDS))
        raise ValueError(f"composed_transfer supports {supported}; got {shape.kind.value}")
    d = params.t0_delta0

    area = pulse_area(shape, shape.tau_start, shape.tau_end)
    if area < min_area:
        raise AreaError(f"pulse area {area:g} is below the floor {min_area:g}")

    if tau_1 is None and tau_2 is None:
        tau_1, tau_2 = _find_junctions(params, shape, gamma_threshold)
    elif tau_1 is None or tau_2 is None:
        raise ValueError("give both junctions or neither")
    else:
        _check_junction(params, shape, tau_1, gamma_threshold, "tau_1")
        _check_junction(params, shape, tau_2, gamma_threshold, "tau_2")
        if tau_1 >= tau_2:
            raise ValueError(f"tau_1 = {tau_1:g} must precede tau_2 = {tau_2:g}")

    plateau = cmath.exp(1j * prop.dynamical_phase(params, shape, tau_1, tau_2))
    u_a = SU2Operator(plateau, 0.0j)

    if shape.kind in _POWER_ENDED:
        n = shape.n if shape.kind is Kind.TRIG_POWER else 1
        lift = asy.universal_lifting(n, d, shape.omega0, enforce_regime=False)
        eta_1 = prop.dynamical_phase(params, shape, shape.tau_start, tau_1)
        eta_c = prop.dynamical_phase(params, shape, tau_2, shape.tau_end)
        u_l = _power_edge(lift, eta_1)
        u_c = prop.falling_from_rising(_power_edge(lift, eta_c))
        u = u_c.compose(u_a).compose(u_l)
        return _point_from_operator(u, d, area)

    # sech: both tails are exponential, so the edge quantities come from
    # the constant-detuning exponential model; the s_i-free phase
    # convention (s_i = 1) is used on both sides and cancels in b_plus.
    zeta_1 = 0.5 * pulse_area(shape, shape.tau_start, tau_1)
    zeta_c = 0.5 * pulse_area(shape, tau_2, shape.tau_end)
    ls = asy.exponential_lifting(d, zeta=min(zeta_1, zeta_c), s_i=1.0)
    xi = ls.common_phase
    u_l = _exponential_edge(ls.p_minus, ls.p_plus, xi, zeta_1)
    u_c = prop.falling_from_rising(_exponential_edge(ls.p_minus, ls.p_plus, xi, zeta_c))
    u = u_c.compose(u_a).compose(u_l)
    return _point_from_operator(
        u, d, area, approximate_minus=True, warning=ls.regime_warning
    )


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------

def rosen_zener(t0_omega0: float, t0_delta0: float) -> LineshapePoint:
    """Exact sech-pulse transfer: P = sin^2(pi w/2) / cosh^2(pi d/2).

    The b_plus amplitude (modulus and phase) is exact for any coupling
    and detuning.  The b_minus modulus is exact too; its phase carries
    the edge phase xi in the s_i-free convention and is reliable only at
    small detuning, hence the flag.
    """
    w = t0_omega0
    d = t0_delta0
    if not (math.isfinite(w) and w > 0.0):
        raise ValueError(f"t0_omega0 must be positive and finite, got {w}")
    if not (math.isfinite(d) and d >= 0.0):
        raise ValueError(f"t0_delta0 must be >= 0 and finite, got {d}")

    half_area = 0.5 * math.pi * w
    sin_a = math.sin(half_area)
    b_plus = -1j * sin_a / math.cosh(0.5 * math.pi * d)
    xi = log_gamma(0.5 + 0.5j * d).imag + d * math.log(2.0)
    b_minus = cmath.exp(2j * xi) * complex(
        math.cos(half_area), sin_a * math.tanh(0.5 * math.pi * d)
    )
    return LineshapePoint(
        t0_delta0=d,
        b_minus=b_minus,
        b_plus=b_plus,
        p_transfer=abs(b_plus) ** 2,
        area=math.pi * w,
        b_minus_phase_approximate=True,
    )


def trig_lineshape(n: int, t0_omega0: float, t0_delta0: float) -> LineshapePoint:
    """Closed-form lineshape for the pulse w0 sin^n(tau) on [0, pi].

    Only the dynamical phase over the pulse and the splitting quantities
    of the discontinuous n-th derivative at the edges enter:

        b_plus  = -2i sqrt(p+ p-) sin(chi- + chi+ + eta_p)
        b_minus = p- e^{i(2 chi- + eta_p)} + p+ e^{-i(2 chi+ + eta_p)}

    b_plus is purely imaginary for every detuning at n = 1, and the two
    moduli close to exactly 1.  Pulses below area pi get a regime flag
    rather than an error.
    """
    if n < 1 or n != int(n):
        raise ValueError(f"n must be an integer >= 1, got {n}")
    w = t0_omega0
    d = t0_delta0
    if not (math.isfinite(w) and w > 0.0):
        raise ValueError(f"t0_omega0 must be positive and finite, got {w}")
    if not (math.isfinite(d) and d >= 0.0):
        raise ValueError(f"t0_delta0 must be >= 0 and finite, got {d}")

    shape = trig_power(int(n), w)
    params = SystemParams(w, d, n=int(n))
    lift = asy.universal_lifting(int(n), d, w, enforce_regime=False)
    eta_p = prop.dynamical_phase(params, shape, 0.0, math.pi)

    total = lift.chi_minus + lift.chi_plus + eta_p
    b_plus = -2j * math.sqrt(lift.p_plus * lift.p_minus) * math.sin(total)
    b_minus = lift.p_minus * cmath.exp(1j * (2.0 * lift.chi_minus + eta_p)) + (
        lift.p_plus * cmath.exp(-1j * (2.0 * lift.chi_plus + eta_p))
    )
    area = pulse_area(shape, 0.0, math.pi)
    warning = None
    if area < TRIG_AREA_FLAG:
        warning = f"pulse area {area:g} is below pi; the large-area premise is rough"
    return LineshapePoint(
        t0_delta0=d,
        b_minus=b_minus,
        b_plus=b_plus,
        p_transfer=abs(b_plus) ** 2,
        area=area,
        regime_warning=warning,
    )


# ---------------------------------------------------------------------------
# Half-SCRAP
# ---------------------------------------------------------------------------

def _pump_window(shape: PulseShape) -> tuple[float, float]:
    """Onset and hand-over time of the pump's rising stage."""
    if shape.kind is Kind.POWER_RISE:
        return shape.tau_start, shape.tau_end
    lo, _ = support(shape)
    if shape.kind is Kind.EXPONENTIAL:
        end = shape.tau_end if math.isfinite(shape.tau_end) else 0.0
    else:  # Gaussian: rising half ends at the peak
        end = min(shape.tau_end, 0.0)
    return lo, end


def half_scrap(
    sequence: Sequence,
    pump_shape: PulseShape,
    t0_omega0: float,
    t0_delta0: float,
    gamma_threshold: float = DEFAULT_GAMMA_THRESHOLD,
) -> HalfScrapResult:
    """Superposition left by one Half-SCRAP sequence.

    The Stark pulse enters only as the direction of the lifting or
    creation path in the (Omega, Delta) plane, so the pump edge profile
    decides everything detuning-dependent.  Stark-pump lifts along Delta
    (single dressed state), follows, and creates quasi-degeneracy along
    Omega at the residual detuning: populations come from the pump-edge
    model of the preceding sections, and the relative phase
    pi + chi_+ - chi_- contains no dynamical phase.  Pump-Stark lifts
    along Omega instead and ends along Delta; the same populations, but
    the relative phase picks up the full dressed-phase difference
    accumulated during following and is not robust.

    pump_shape must be a rising profile (power_rise, rising exponential,
    or gaussian, the latter evaluated numerically up to its peak); its
    omega0 must equal t0_omega0.  The time-mirrored edge used by the
    Stark-pump creation stage has identical populations, so both
    sequences report the same p_plus_final.
    """
    if not isinstance(sequence, Sequence):
        raise ValueError(f"sequence must be a Sequence member, got {sequence!r}")
    if pump_shape.kind not in _PUMP_KINDS:
        allowed = ", ".join(sorted(k.value for k in _PUMP_KINDS))
        raise ValueError(f"pump shape must be one of {allowed}; got {pump_shape.kind.value}")
    if pump_shape.kind is Kind.EXPONENTIAL and pump_shape.sign != 1:
        raise ValueError("exponential pump must be rising (sign = +1)")
    if pump_shape.omega0 != t0_omega0:
        raise ValueError(
            f"pump_shape.omega0 = {pump_shape.omega0:g} disagrees with "
            f"t0_omega0 = {t0_omega0:g}"
        )
    d = t0_delta0
    if not (math.isfinite(d) and d >= 0.0):
        raise ValueError(f"t0_delta0 must be >= 0 and finite, got {d}")

    params = SystemParams(t0_omega0, d, n=pump_shape.n)
    onset, end = _pump_window(pump_shape)
    g_end = _gamma_tilde(params, pump_shape, end)
    if g_end > gamma_threshold:
        raise JunctionError(
            f"pump hand-over at tau = {end:g} is not adiabatic: "
            f"gamma_tilde = {g_end:.3e} > {gamma_threshold:g}"
        )

    method = "analytic"
    if pump_shape.kind is Kind.POWER_RISE:
        lift = asy.universal_lifting(pump_shape.n, d, t0_omega0, enforce_regime=False)
        p_plus = lift.p_plus
        chi_minus, chi_plus = lift.chi_minus, lift.chi_plus
        eta_end = prop.dynamical_phase(params, pump_shape, onset, end)
        phase_sp = math.pi + chi_plus - chi_minus
        phase_ps = -(chi_minus + chi_plus) - 2.0 * eta_end
    elif pump_shape.kind is Kind.EXPONENTIAL:
        zeta_end = 0.5 * pulse_area(pump_shape, pump_shape.tau_start, end)
        ls = asy.exponential_lifting(d, zeta=zeta_end, s_i=1.0)
        p_plus = ls.p_plus
        # chi_- = +xi and chi_+ = -xi in the power-edge convention
        phase_sp = math.pi - 2.0 * ls.common_phase
        phase_ps = -2.0 * zeta_end
    else:
        # Gaussian: no closed lifting formula; integrate the rising half
        # and read the adiabatic amplitudes at the hand-over.
        method = "numeric"
        u = prop.propagate(params, pump_shape, onset, end)
        theta = prop.mixing_angle(rabi_at(pump_shape, end), d)
        b_minus, b_plus = u.u11, -u.u12.conjugate()
        a_minus = math.cos(theta) * b_minus - math.sin(theta) * b_plus
        a_plus = math.sin(theta) * b_minus + math.cos(theta) * b_plus
        p_plus = abs(a_plus) ** 2
        phase_sp = math.pi - (cmath.phase(a_plus) + cmath.phase(a_minus))
        phase_ps = cmath.phase(a_plus) - cmath.phase(a_minus)

    if sequence is Sequence.STARK_PUMP:
        relative = phase_sp
        robust = True
    else:
        relative = phase_ps
        robust = False
    return HalfScrapResult(
        sequence=sequence,
        p_plus_final=p_plus,
        relative_phase=math.remainder(relative, 2.0 * math.pi),
        robust_phase=robust,
        method=method,
    )
