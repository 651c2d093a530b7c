"""Scenario runner and reproduction harness.

Four verbs:

    twolevel run <config>      execute one scenario file, write its report
    twolevel sweep <config>    same, but the config must declare a sweep
    twolevel figure <id>       rebuild the dataset behind a built-in figure
    twolevel validate          run the full acceptance suite

Scenario configs are TOML.  A minimal sweep over detuning::

    name = "sine-lineshape"
    models = ["trig"]

    [shape]
    kind = "trig_power"
    t0_omega0 = 1.5707963267948966
    n = 1

    [params]
    t0_omega0 = 1.5707963267948966
    t0_delta0 = 0.0

    [sweep]
    parameter = "t0_delta0"   # or "t0_omega0" or "tau"
    from = 0.0
    to = 6.0
    points = 61

    [thresholds]              # optional; breach flips the exit code to 2
    max_abs_error = 0.05

The observable compared against the ODE oracle is the transfer
probability: the adiabatic upper population for rising edges
(power_rise, rising exponential, gaussian up to its peak) and the bare
|B+|^2 after the pulse for complete pulses (trig powers, triangle,
sech).  Reports list one row per sweep value with per-model absolute
and relative errors; rows where the oracle integration fails are
marked failed and the sweep continues.

CSV reports quote nothing, use '\\n' line endings, and print floats
with repr precision, so a rerun of the same config is byte-identical.
Complex model amplitudes never appear directly: figure files emit
magnitude and unwrapped-phase columns instead.

Exit codes: 0 success, 2 threshold breach (or a failed acceptance
criterion under `validate`), 3 config error, 4 numeric failure in at
least one row.  The default output directory is the TWOLEVEL_OUT_DIR
environment variable, falling back to the working directory.
"""
from __future__ import annotations

import argparse
import cmath
import dataclasses
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - 3.10 fallback
    import tomli as tomllib

import numpy as np

from . import asymptotics as asy
from . import lineshape as lsh
from . import propagator as prop
from . import pulses
from .asymptotics import RegimeError
from .lineshape import AreaError, JunctionError, Sequence
from .propagator import IntegrationError, SU2Operator
from .pulses import Kind, PulseShape, SystemParams

EXIT_OK = 0
EXIT_THRESHOLD = 2
EXIT_CONFIG = 3
EXIT_NUMERIC = 4

OUT_DIR_ENV = "TWOLEVEL_OUT_DIR"
ORACLE_TOL = 1e-10

SWEEP_PARAMETERS = ("t0_delta0", "t0_omega0", "tau")

_RISING_KINDS = frozenset({Kind.POWER_RISE, Kind.EXPONENTIAL, Kind.GAUSSIAN})


class ConfigError(ValueError):
    """Scenario file rejected; the message names the offending field."""


# ---------------------------------------------------------------------------
# Scenario model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Sweep:
    parameter: str
    start: float
    stop: float
    points: int


@dataclass(frozen=True)
class Scenario:
    name: str
    shape: PulseShape
    params: SystemParams
    models: tuple[str, ...]
    sweep: Sweep | None = None
    output: str | None = None
    max_abs_error: float | None = None


@dataclass(frozen=True)
class Row:
    sweep_value: float
    oracle: float | None
    values: dict
    abs_errors: dict
    rel_errors: dict
    failed: bool = False
    message: str | None = None


@dataclass(frozen=True)
class ComparisonReport:
    scenario: str
    sweep_parameter: str
    models: tuple[str, ...]
    rows: tuple
    max_abs_error: dict
    regime_flags: tuple

    def breached(self, bound: float | None) -> bool:
        if bound is None:
            return False
        return any(
            err is not None and err > bound for err in self.max_abs_error.values()
        )


# ---------------------------------------------------------------------------
# Config parsing
# ---------------------------------------------------------------------------

def _field(table: dict, key: str, kinds, where: str):
    if key not in table:
        raise ConfigError(f"{where}: missing required field '{key}'")
    value = table[key]
    if not isinstance(value, kinds):
        raise ConfigError(
            f"{where}.{key}: expected {getattr(kinds, '__name__', kinds)}, "
            f"got {type(value).__name__}"
        )
    return value


def _number(table: dict, key: str, where: str) -> float:
    return float(_field(table, key, (int, float), where))


def parse_scenario(text: str, fallback_name: str = "scenario") -> Scenario:
    """Parse a TOML scenario; raises ConfigError with field/line context."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        # tomllib already reports line and column
        raise ConfigError(f"config syntax: {exc}") from exc

    name = data.get("name", fallback_name)
    if not isinstance(name, str) or not name:
        raise ConfigError("name: must be a non-empty string")

    shape_rec = _field(data, "shape", dict, "config")
    try:
        shape = pulses.shape_from_config(shape_rec)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"shape: {exc}") from exc

    params_rec = _field(data, "params", dict, "config")
    t0_omega0 = _number(params_rec, "t0_omega0", "params")
    t0_delta0 = _number(params_rec, "t0_delta0", "params")
    try:
        params = SystemParams(t0_omega0, t0_delta0, n=shape.n)
    except ValueError as exc:
        raise ConfigError(f"params: {exc}") from exc

    models_raw = _field(data, "models", list, "config")
    if not models_raw:
        raise ConfigError("models: must name at least one analytic model")
    models = []
    for i, entry in enumerate(models_raw):
        if not isinstance(entry, str):
            raise ConfigError(f"models[{i}]: expected string, got {type(entry).__name__}")
        if entry not in MODELS:
            known = ", ".join(sorted(MODELS))
            raise ConfigError(f"models[{i}]: unknown model '{entry}' (known: {known})")
        models.append(entry)

    sweep = None
    if "sweep" in data:
        sweep_rec = _field(data, "sweep", dict, "config")
        parameter = _field(sweep_rec, "parameter", str, "sweep")
        if parameter not in SWEEP_PARAMETERS:
            raise ConfigError(
                f"sweep.parameter: must be one of {', '.join(SWEEP_PARAMETERS)}; "
                f"got '{parameter}'"
            )
        start = _number(sweep_rec, "from", "sweep")
        stop = _number(sweep_rec, "to", "sweep")
        points = _field(sweep_rec, "points", int, "sweep")
        if points < 2:
            raise ConfigError(f"sweep.points: must be >= 2, got {points}")
        sweep = Sweep(parameter, start, stop, points)

    output = data.get("output")
    if output is not None and not isinstance(output, str):
        raise ConfigError("output: must be a string path")

    bound = None
    if "thresholds" in data:
        thr = _field(data, "thresholds", dict, "config")
        bound = _number(thr, "max_abs_error", "thresholds")
        if bound <= 0.0:
            raise ConfigError(f"thresholds.max_abs_error: must be positive, got {bound}")

    scenario = Scenario(name, shape, params, tuple(models), sweep, output, bound)
    for model in scenario.models:
        MODELS[model].check(scenario.shape)
    if sweep is not None and sweep.parameter == "tau":
        lo, hi = _observable_window(shape)
        if sweep.start < lo - 1e-12 or sweep.stop > hi + 1e-12:
            raise ConfigError(
                f"sweep: tau range [{sweep.start:g}, {sweep.stop:g}] leaves the "
                f"pulse window [{lo:g}, {hi:g}]"
            )
    return scenario


def load_scenario(path: Path) -> Scenario:
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_scenario(text, fallback_name=path.stem)


# ---------------------------------------------------------------------------
# Observable and oracle
# ---------------------------------------------------------------------------

def _is_rising(shape: PulseShape) -> bool:
    if shape.kind is Kind.EXPONENTIAL:
        return shape.sign == 1
    return shape.kind in _RISING_KINDS


def _observable_window(shape: PulseShape) -> tuple[float, float]:
    lo, hi = pulses.support(shape)
    if shape.kind is Kind.GAUSSIAN:
        hi = min(hi, 0.0)  # rising half only
    return lo, hi


def _split_amplitudes(params, shape, tau_b, u):
    """Adiabatic (a_minus, a_plus) at tau_b for a bare-ground start.

    Projects the evolved bare state onto the dressed basis at tau_b only;
    at zero detuning a truncated edge starts exactly on the conical
    intersection, where the start frame of to_adiabatic_frame is undefined
    but the bare initial condition still is.
    """
    theta_b = prop.mixing_angle(pulses.rabi_at(shape, tau_b), params.t0_delta0)
    v = u.apply(prop.StateVector(1.0, 0.0))
    c, s = math.cos(theta_b), math.sin(theta_b)
    return c * v.b_minus - s * v.b_plus, s * v.b_minus + c * v.b_plus


def _adiabatic_pplus(params, shape, tau_a, tau_b, tol) -> float:
    u = prop.propagate(params, shape, tau_a, tau_b, tol=tol)
    return abs(_split_amplitudes(params, shape, tau_b, u)[1]) ** 2


def _oracle_at(params: SystemParams, shape: PulseShape, tol: float) -> float:
    lo, hi = _observable_window(shape)
    if _is_rising(shape):
        return _adiabatic_pplus(params, shape, lo, hi, tol)
    u = prop.propagate(params, shape, lo, hi, tol=tol)
    return abs(u.u12) ** 2


# ---------------------------------------------------------------------------
# Analytic models
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelSpec:
    """One analytic prediction of the transfer probability."""

    name: str
    kinds: frozenset
    evaluate: object  # callable(shape, params) -> (value, flags)
    requires_n: int | None = None

    def check(self, shape: PulseShape) -> None:
        if shape.kind not in self.kinds:
            allowed = ", ".join(sorted(k.value for k in self.kinds))
            raise ConfigError(
                f"models: '{self.name}' applies to {allowed}; got {shape.kind.value}"
            )
        if self.requires_n is not None and shape.n != self.requires_n:
            raise ConfigError(
                f"models: '{self.name}' needs edge power n = {self.requires_n}; "
                f"got n = {shape.n}"
            )


def _edge_power(shape: PulseShape) -> int:
    return 1 if shape.kind is Kind.LINEAR_TRUNCATED else shape.n


def _eval_linear(shape: PulseShape, params: SystemParams):
    omega = params.t0_delta0 / math.sqrt(2.0 * shape.omega0)
    return asy.linear_lifting(omega).p_plus, []


def _eval_exponential(shape: PulseShape, params: SystemParams):
    lo, hi = _observable_window(shape)
    zeta = 0.5 * pulses.pulse_area(shape, lo, hi)
    r = asy.exponential_lifting(params.t0_delta0, zeta=zeta, s_i=1.0)
    return r.p_plus, [f"exponential: {r.regime_warning}"] if r.regime_warning else []


def _eval_universal(shape: PulseShape, params: SystemParams):
    n = _edge_power(shape)
    d, w = params.t0_delta0, shape.omega0
    r = asy.universal_lifting(n, d, w, enforce_regime=False)
    flags = []
    if 2.0 * math.hypot(d, w) < asy.UNIVERSAL_ADIABATICITY_FACTOR * n:
        flags.append(
            f"universal: adiabaticity scale 2*sqrt(d^2+w^2) = "
            f"{2.0 * math.hypot(d, w):.3g} below {asy.UNIVERSAL_ADIABATICITY_FACTOR * n:g}"
        )
    return r.p_plus, flags


def _eval_large_detuning(shape: PulseShape, params: SystemParams):
    n = _edge_power(shape)
    d, w = params.t0_delta0, shape.omega0
    if d <= 0.0:
        return None, ["large_detuning: undefined at zero detuning"]
    alpha = d * (d / w) ** (1.0 / n)
    try:
        terms = asy.large_detuning_transfer(n, alpha)
    except RegimeError as exc:
        return None, [f"large_detuning: {exc}"]
    return terms.p_plus, []


def _eval_small_detuning(shape: PulseShape, params: SystemParams):
    n = _edge_power(shape)
    r = asy.small_detuning_transfer(shape.kind, n, params.t0_delta0, shape.omega0)
    flags = [f"small_detuning: {r.regime_warning}"] if r.regime_warning else []
    return r.p_plus, flags


def _eval_trig(shape: PulseShape, params: SystemParams):
    pt = lsh.trig_lineshape(shape.n, shape.omega0, params.t0_delta0)
    flags = [f"trig: {pt.regime_warning}"] if pt.regime_warning else []
    return pt.p_transfer, flags


def _eval_rosen_zener(shape: PulseShape, params: SystemParams):
    return lsh.rosen_zener(shape.omega0, params.t0_delta0).p_transfer, []


def _eval_composed(shape: PulseShape, params: SystemParams):
    try:
        pt = lsh.composed_transfer(params, shape)
    except (AreaError, JunctionError) as exc:
        return None, [f"composed: {exc}"]
    flags = [f"composed: {pt.regime_warning}"] if pt.regime_warning else []
    return pt.p_transfer, flags


MODELS = {
    "linear": ModelSpec(
        "linear", frozenset({Kind.POWER_RISE}), _eval_linear, requires_n=1
    ),
    "exponential": ModelSpec(
        "exponential", frozenset({Kind.EXPONENTIAL}), _eval_exponential
    ),
    "universal": ModelSpec(
        "universal",
        frozenset({Kind.POWER_RISE, Kind.TRIG_POWER, Kind.LINEAR_TRUNCATED}),
        _eval_universal,
    ),
    "large_detuning": ModelSpec(
        "large_detuning", frozenset({Kind.POWER_RISE}), _eval_large_detuning
    ),
    "small_detuning": ModelSpec(
        "small_detuning",
        frozenset({Kind.POWER_RISE, Kind.EXPONENTIAL, Kind.GAUSSIAN}),
        _eval_small_detuning,
    ),
    "trig": ModelSpec("trig", frozenset({Kind.TRIG_POWER}), _eval_trig),
    "rosen_zener": ModelSpec("rosen_zener", frozenset({Kind.SECH}), _eval_rosen_zener),
    "composed": ModelSpec(
        "composed",
        frozenset({Kind.TRIG_POWER, Kind.LINEAR_TRUNCATED, Kind.SECH}),
        _eval_composed,
    ),
}


# ---------------------------------------------------------------------------
# Scenario execution
# ---------------------------------------------------------------------------

def _materialize(scenario: Scenario, value: float):
    """(shape, params) with the sweep parameter replaced by `value`."""
    shape, params = scenario.shape, scenario.params
    parameter = scenario.sweep.parameter if scenario.sweep else "t0_delta0"
    if parameter == "t0_delta0":
        params = dataclasses.replace(params, t0_delta0=value)
    elif parameter == "t0_omega0":
        params = dataclasses.replace(params, t0_omega0=value)
        shape = dataclasses.replace(shape, omega0=value)
    return shape, params


def _model_row(models, shape, params):
    values, flags = {}, []
    for name in models:
        try:
            value, model_flags = MODELS[name].evaluate(shape, params)
        except RegimeError as exc:
            value, model_flags = None, [f"{name}: {exc}"]
        values[name] = value
        flags.extend(model_flags)
    return values, flags


def _finish_row(sweep_value, oracle, values):
    abs_errors, rel_errors = {}, {}
    for name, value in values.items():
        if value is None or oracle is None:
            abs_errors[name] = None
            rel_errors[name] = None
            continue
        err = abs(value - oracle)
        abs_errors[name] = err
        rel_errors[name] = err / abs(oracle) if oracle != 0.0 else None
    return Row(sweep_value, oracle, values, abs_errors, rel_errors)


def _sweep_values(scenario: Scenario) -> list:
    if scenario.sweep is None:
        return [scenario.params.t0_delta0]
    s = scenario.sweep
    return [float(v) for v in np.linspace(s.start, s.stop, s.points)]


def _run_parameter_sweep(scenario, values, tol, workers):
    def one(value: float) -> Row:
        shape, params = _materialize(scenario, value)
        model_values, flags = _model_row(scenario.models, shape, params)
        try:
            oracle = _oracle_at(params, shape, tol)
        except IntegrationError as exc:
            row = Row(value, None, model_values,
                      {m: None for m in model_values},
                      {m: None for m in model_values},
                      failed=True, message=str(exc))
            return row, flags
        return _finish_row(value, oracle, model_values), flags

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(one, values))
    else:
        outcomes = [one(v) for v in values]
    rows = [row for row, _ in outcomes]
    flags = [f for _, row_flags in outcomes for f in row_flags]
    return rows, flags


def _run_tau_sweep(scenario, values, tol):
    shape, params = scenario.shape, scenario.params
    lo, _ = _observable_window(shape)
    rising = _is_rising(shape)
    model_values, flags = _model_row(scenario.models, shape, params)
    rows = []
    try:
        operators = prop.propagate_trajectory(params, shape, [lo] + values, tol=tol)
    except IntegrationError as exc:
        empty = {m: None for m in model_values}
        return [
            Row(v, None, model_values, dict(empty), dict(empty),
                failed=True, message=str(exc))
            for v in values
        ], flags
    for value, u in zip(values, operators[1:]):
        if rising:
            try:
                oracle = abs(_split_amplitudes(params, shape, value, u)[1]) ** 2
            except ValueError as exc:  # end point on the conical intersection
                empty = {m: None for m in model_values}
                rows.append(Row(value, None, model_values, dict(empty), dict(empty),
                                failed=True, message=str(exc)))
                continue
        else:
            oracle = abs(u.u12) ** 2
        rows.append(_finish_row(value, oracle, model_values))
    return rows, flags


def run_scenario(
    scenario: Scenario, tol: float = ORACLE_TOL, workers: int = 1
) -> ComparisonReport:
    """Execute one scenario; deterministic for a fixed config and tol."""
    values = _sweep_values(scenario)
    parameter = scenario.sweep.parameter if scenario.sweep else "t0_delta0"
    if parameter == "tau":
        rows, flags = _run_tau_sweep(scenario, values, tol)
    else:
        rows, flags = _run_parameter_sweep(scenario, values, tol, workers)

    max_abs = {}
    for name in scenario.models:
        errs = [
            r.abs_errors[name]
            for r in rows
            if not r.failed and r.abs_errors[name] is not None
        ]
        max_abs[name] = max(errs) if errs else None
    unique_flags = tuple(sorted(set(flags)))
    return ComparisonReport(
        scenario=scenario.name,
        sweep_parameter=parameter,
        models=scenario.models,
        rows=tuple(rows),
        max_abs_error=max_abs,
        regime_flags=unique_flags,
    )


# ---------------------------------------------------------------------------
# Report rendering
# ---------------------------------------------------------------------------

def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def report_header(report: ComparisonReport) -> list:
    header = [report.sweep_parameter, "oracle"]
    for name in report.models:
        header += [name, f"{name}_abs_err", f"{name}_rel_err"]
    return header + ["failed", "message"]


def render_csv(report: ComparisonReport) -> str:
    lines = [",".join(report_header(report))]
    for row in report.rows:
        cells = [_cell(row.sweep_value), _cell(row.oracle)]
        for name in report.models:
            cells += [
                _cell(row.values[name]),
                _cell(row.abs_errors[name]),
                _cell(row.rel_errors[name]),
            ]
        cells += ["true" if row.failed else "false", row.message or ""]
        lines.append(",".join(cells))
    lines.append("")
    return "\n".join(lines)


def render_json(report: ComparisonReport) -> str:
    payload = {
        "scenario": report.scenario,
        "sweep_parameter": report.sweep_parameter,
        "models": list(report.models),
        "rows": [
            {
                "sweep_value": row.sweep_value,
                "oracle": row.oracle,
                "values": row.values,
                "abs_errors": row.abs_errors,
                "rel_errors": row.rel_errors,
                "failed": row.failed,
                "message": row.message,
            }
            for row in report.rows
        ],
        "max_abs_error": report.max_abs_error,
        "regime_flags": list(report.regime_flags),
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def write_report(report: ComparisonReport, path: Path, fmt: str) -> None:
    text = render_json(report) if fmt == "json" else render_csv(report)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


# ---------------------------------------------------------------------------
# Figure reproduction
# ---------------------------------------------------------------------------

def _write_curve(path: Path, header: list, columns: list) -> Path:
    """Write one CSV whose k-th column is columns[k] (all equal length)."""
    rows = zip(*columns)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    lines.append("")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines))
    return path


def _unwrap(values) -> list:
    return [float(v) for v in np.unwrap([cmath.phase(z) for z in values])]


def _adiabatic_history(params, shape, taus, tol):
    """(p_plus, a_minus, a_plus) along taus, starting from the bare ground."""
    ops = prop.propagate_trajectory(params, shape, taus, tol=tol)
    p_hist, minus, plus = [], [], []
    for tau, u in zip(taus, ops):
        a_minus, a_plus = _split_amplitudes(params, shape, tau, u)
        minus.append(a_minus)
        plus.append(a_plus)
        p_hist.append(abs(a_plus) ** 2)
    return p_hist, minus, plus


def _fig1(out: Path, tol: float) -> list:
    taus = [3.0 * k / 240 for k in range(241)]
    written = []
    for n in (1, 2, 4):
        shape = pulses.power_rise(n, 100.0, tau_end=3.0)
        columns = [taus]
        header = ["tau"]
        for d in (1.0, 2.0, 5.0, 10.0):
            params = SystemParams(100.0, d, n=n)
            p_hist, _, _ = _adiabatic_history(params, shape, taus, tol)
            header.append(f"p_plus_d{d:g}")
            columns.append(p_hist)
        written.append(_write_curve(out / f"fig1_n{n}.csv", header, columns))
    return written


def _fig2(out: Path, tol: float) -> list:
    shape = pulses.power_rise(1, 100.0, tau_end=1.0)
    params = SystemParams(100.0, 5.0)
    r = asy.linear_lifting(params.omega)
    taus = [k / 200 for k in range(201)]
    p_hist, minus, plus = _adiabatic_history(params, shape, taus, tol)
    etas = [prop.dynamical_phase(params, shape, 0.0, t) for t in taus]
    model_minus = [r.chi_minus + e for e in etas]
    model_plus = [-(r.chi_plus + e) for e in etas]
    pop = _write_curve(
        out / "fig2_populations.csv",
        ["tau", "p_plus_ode", "p_plus_model"],
        [taus, p_hist, [r.p_plus] * len(taus)],
    )
    phases = _write_curve(
        out / "fig2_phases.csv",
        ["tau", "arg_a_minus_ode", "arg_a_minus_model",
         "arg_a_plus_ode", "arg_a_plus_model"],
        [taus, _unwrap(minus), model_minus, _unwrap(plus), model_plus],
    )
    return [pop, phases]


def _fig3(out: Path, tol: float) -> list:
    omegas = [3.0 * k / 300 for k in range(301)]
    results = [asy.linear_lifting(w) for w in omegas]
    return [
        _write_curve(
            out / "fig3_splitting.csv",
            ["omega", "p_plus", "chi_minus", "chi_plus"],
            [
                omegas,
                [r.p_plus for r in results],
                [r.chi_minus for r in results],
                [r.chi_plus for r in results],
            ],
        )
    ]


def _fig4(out: Path, tol: float) -> list:
    shape = pulses.exponential(100.0, 1, tau_end=0.0)
    params = SystemParams(100.0, 0.4)
    taus = [-12.0 + 12.0 * k / 240 for k in range(241)]
    p_hist, minus, plus = _adiabatic_history(params, shape, taus, tol)
    zeta_total = 0.5 * pulses.pulse_area(shape, taus[0], 0.0)
    r = asy.exponential_lifting(0.4, zeta=zeta_total, s_i=100.0 * math.exp(taus[0]))
    zetas = [0.5 * pulses.pulse_area(shape, taus[0], t) for t in taus]
    model_minus = [r.common_phase + r.chi_minus + z for z in zetas]
    model_plus = [r.common_phase - (r.chi_plus + z) for z in zetas]
    pop = _write_curve(
        out / "fig4_populations.csv",
        ["tau", "p_plus_ode", "p_plus_model"],
        [taus, p_hist, [r.p_plus] * len(taus)],
    )
    phases = _write_curve(
        out / "fig4_phases.csv",
        ["tau", "arg_a_minus_ode", "arg_a_minus_model",
         "arg_a_plus_ode", "arg_a_plus_model"],
        [taus, _unwrap(minus), model_minus, _unwrap(plus), model_plus],
    )
    return [pop, phases]


def _fig_rising_comparison(out: Path, tol: float, stem: str, n: int, tau_f: float) -> list:
    shape = pulses.power_rise(n, 100.0, tau_end=tau_f)
    detunings = [20.0 * k / 40 for k in range(41)]
    p_ode = []
    minus_amp, plus_amp = [], []
    for d in detunings:
        params = SystemParams(100.0, d, n=n)
        u = prop.propagate(params, shape, 0.0, tau_f, tol=tol)
        a_minus, a_plus = _split_amplitudes(params, shape, tau_f, u)
        p_ode.append(abs(a_plus) ** 2)
        minus_amp.append(a_minus)
        plus_amp.append(a_plus)
    p_universal, p_large, p_small = [], [], []
    arg_minus_model, arg_plus_model = [], []
    for d in detunings:
        params = SystemParams(100.0, d, n=n)
        value, _ = _eval_universal(shape, params)
        p_universal.append(value)
        if d > 0.0:  # plotted ungated so the drift below the floor shows
            terms = asy.large_detuning_transfer(n, params.alpha_n, enforce_floor=False)
            p_large.append(terms.p_plus)
        else:
            p_large.append(None)
        value, _ = _eval_small_detuning(shape, params)
        p_small.append(value)
        r = asy.universal_lifting(n, d, 100.0, enforce_regime=False)
        eta = prop.dynamical_phase(params, shape, 0.0, tau_f)
        arg_minus_model.append(r.chi_minus + eta)
        arg_plus_model.append(-(r.chi_plus + eta))
    pop = _write_curve(
        out / f"{stem}_populations.csv",
        ["t0_delta0", "p_plus_ode", "p_plus_universal",
         "p_plus_large_detuning", "p_plus_small_detuning"],
        [detunings, p_ode, p_universal, p_large, p_small],
    )
    phases = _write_curve(
        out / f"{stem}_phases.csv",
        ["t0_delta0", "arg_a_minus_ode", "arg_a_minus_universal",
         "arg_a_plus_ode", "arg_a_plus_universal"],
        [detunings, _unwrap(minus_amp), arg_minus_model,
         _unwrap(plus_amp), arg_plus_model],
    )
    return [pop, phases]


def _fig5(out: Path, tol: float) -> list:
    return _fig_rising_comparison(out, tol, "fig5", n=2, tau_f=3.0)


def _fig6(out: Path, tol: float) -> list:
    return _fig_rising_comparison(out, tol, "fig6", n=3, tau_f=2.5)


def _fig7(out: Path, tol: float) -> list:
    xs = [10.0 * k / 200 for k in range(201)]
    return [
        _write_curve(
            out / "fig7_G.csv", ["x", "G"], [xs, [asy.gaussian_G(x) for x in xs]]
        )
    ]


def _fig_lineshape(out: Path, tol: float, stem: str, n: int, w: float) -> list:
    shape = pulses.trig_power(n, w)
    detunings = [6.0 * k / 120 for k in range(121)]
    p_ode, b_minus, b_plus = [], [], []
    for d in detunings:
        params = SystemParams(w, d, n=n)
        u = prop.propagate(params, shape, 0.0, math.pi, tol=tol)
        p_ode.append(abs(u.u12) ** 2)
        b_minus.append(u.u11)
        b_plus.append(-u.u12.conjugate())
    points = [lsh.trig_lineshape(n, w, d) for d in detunings]
    pop = _write_curve(
        out / f"{stem}_lineshape.csv",
        ["t0_delta0", "p_transfer_ode", "p_transfer_model"],
        [detunings, p_ode, [pt.p_transfer for pt in points]],
    )
    phases = _write_curve(
        out / f"{stem}_phases.csv",
        ["t0_delta0", "arg_b_minus_ode", "arg_b_minus_model",
         "arg_b_plus_ode", "arg_b_plus_model"],
        [
            detunings,
            _unwrap(b_minus),
            _unwrap(pt.b_minus for pt in points),
            _unwrap(b_plus),
            _unwrap(pt.b_plus for pt in points),
        ],
    )
    return [pop, phases]


def _fig8(out: Path, tol: float) -> list:
    return _fig_lineshape(out, tol, "fig8", n=1, w=math.pi / 2.0)


def _fig9(out: Path, tol: float) -> list:
    return _fig_lineshape(out, tol, "fig9", n=2, w=2.0)


def _fig10(out: Path, tol: float) -> list:
    return _fig_lineshape(out, tol, "fig10", n=2, w=6.0)


def _fig11(out: Path, tol: float) -> list:
    grid = [5.0 * k / 40 for k in range(41)]
    omega_col, delta_col, lower_col, upper_col = [], [], [], []
    for w in grid:
        for d in grid:
            lower, upper = lsh.eigenenergy_surface(w, d)
            omega_col.append(w)
            delta_col.append(d)
            lower_col.append(lower)
            upper_col.append(upper)
    return [
        _write_curve(
            out / "fig11_surfaces.csv",
            ["t0_omega", "t0_delta", "lambda_minus", "lambda_plus"],
            [omega_col, delta_col, lower_col, upper_col],
        )
    ]


def _figliftall(out: Path, tol: float) -> list:
    written = []
    detunings = [20.0 * k / 40 for k in range(41)]
    for n in (2, 4):
        header = ["t0_delta0"]
        columns = [detunings]
        for w in (10.0, 100.0, 1000.0):
            # populations freeze once the splitting scale is large; stop
            # there instead of a fixed late time
            tau_f = min(3.0, (400.0 / w) ** (1.0 / n))
            shape = pulses.power_rise(n, w, tau_end=tau_f)
            ode_col, model_col = [], []
            for d in detunings:
                params = SystemParams(w, d, n=n)
                ode_col.append(_adiabatic_pplus(params, shape, 0.0, tau_f, tol))
                model_col.append(
                    asy.universal_lifting(n, d, w, enforce_regime=False).p_plus
                )
            header += [f"p_plus_ode_w{w:g}", f"p_plus_model_w{w:g}"]
            columns += [ode_col, model_col]
        written.append(_write_curve(out / f"figliftall_power_n{n}.csv", header, columns))

    gauss_detunings = [12.0 * k / 24 for k in range(25)]
    header = ["t0_delta0"]
    columns = [gauss_detunings]
    for w in (10.0, 100.0, 1000.0):
        col = [
            lsh.half_scrap(Sequence.STARK_PUMP, pulses.gaussian(w), w, d).p_plus_final
            for d in gauss_detunings
        ]
        header.append(f"p_plus_ode_w{w:g}")
        columns.append(col)
    written.append(_write_curve(out / "figliftall_gaussian.csv", header, columns))

    exp_shape = pulses.exponential(100.0, 1, tau_end=0.0)
    col = [
        lsh.half_scrap(Sequence.STARK_PUMP, exp_shape, 100.0, d).p_plus_final
        for d in gauss_detunings
    ]
    written.append(
        _write_curve(
            out / "figliftall_exponential.csv",
            ["t0_delta0", "p_plus_model"],
            [gauss_detunings, col],
        )
    )
    return written


# Column catalog for every dataset a figure id emits.  This is the schema
# contract the tests pin and the README documents; complex amplitudes
# always appear as magnitude-free unwrapped-phase columns next to the
# population columns.
FIGURE_COLUMNS = {
    "fig1": {
        "fig1_n1.csv": ["tau", "p_plus_d1", "p_plus_d2", "p_plus_d5", "p_plus_d10"],
        "fig1_n2.csv": ["tau", "p_plus_d1", "p_plus_d2", "p_plus_d5", "p_plus_d10"],
        "fig1_n4.csv": ["tau", "p_plus_d1", "p_plus_d2", "p_plus_d5", "p_plus_d10"],
    },
    "fig2": {
        "fig2_populations.csv": ["tau", "p_plus_ode", "p_plus_model"],
        "fig2_phases.csv": ["tau", "arg_a_minus_ode", "arg_a_minus_model",
                            "arg_a_plus_ode", "arg_a_plus_model"],
    },
    "fig3": {
        "fig3_splitting.csv": ["omega", "p_plus", "chi_minus", "chi_plus"],
    },
    "fig4": {
        "fig4_populations.csv": ["tau", "p_plus_ode", "p_plus_model"],
        "fig4_phases.csv": ["tau", "arg_a_minus_ode", "arg_a_minus_model",
                            "arg_a_plus_ode", "arg_a_plus_model"],
    },
    "fig5": {
        "fig5_populations.csv": ["t0_delta0", "p_plus_ode", "p_plus_universal",
                                 "p_plus_large_detuning", "p_plus_small_detuning"],
        "fig5_phases.csv": ["t0_delta0", "arg_a_minus_ode", "arg_a_minus_universal",
                            "arg_a_plus_ode", "arg_a_plus_universal"],
    },
    "fig6": {
        "fig6_populations.csv": ["t0_delta0", "p_plus_ode", "p_plus_universal",
                                 "p_plus_large_detuning", "p_plus_small_detuning"],
        "fig6_phases.csv": ["t0_delta0", "arg_a_minus_ode", "arg_a_minus_universal",
                            "arg_a_plus_ode", "arg_a_plus_universal"],
    },
    "fig7": {
        "fig7_G.csv": ["x", "G"],
    },
    "fig8": {
        "fig8_lineshape.csv": ["t0_delta0", "p_transfer_ode", "p_transfer_model"],
        "fig8_phases.csv": ["t0_delta0", "arg_b_minus_ode", "arg_b_minus_model",
                            "arg_b_plus_ode", "arg_b_plus_model"],
    },
    "fig9": {
        "fig9_lineshape.csv": ["t0_delta0", "p_transfer_ode", "p_transfer_model"],
        "fig9_phases.csv": ["t0_delta0", "arg_b_minus_ode", "arg_b_minus_model",
                            "arg_b_plus_ode", "arg_b_plus_model"],
    },
    "fig10": {
        "fig10_lineshape.csv": ["t0_delta0", "p_transfer_ode", "p_transfer_model"],
        "fig10_phases.csv": ["t0_delta0", "arg_b_minus_ode", "arg_b_minus_model",
                             "arg_b_plus_ode", "arg_b_plus_model"],
    },
    "fig11": {
        "fig11_surfaces.csv": ["t0_omega", "t0_delta", "lambda_minus", "lambda_plus"],
    },
    "figliftall": {
        "figliftall_power_n2.csv": [
            "t0_delta0", "p_plus_ode_w10", "p_plus_model_w10",
            "p_plus_ode_w100", "p_plus_model_w100",
            "p_plus_ode_w1000", "p_plus_model_w1000",
        ],
        "figliftall_power_n4.csv": [
            "t0_delta0", "p_plus_ode_w10", "p_plus_model_w10",
            "p_plus_ode_w100", "p_plus_model_w100",
            "p_plus_ode_w1000", "p_plus_model_w1000",
        ],
        "figliftall_gaussian.csv": [
            "t0_delta0", "p_plus_ode_w10", "p_plus_ode_w100", "p_plus_ode_w1000",
        ],
        "figliftall_exponential.csv": ["t0_delta0", "p_plus_model"],
    },
}

FIGURES = {
    "fig1": _fig1,
    "fig2": _fig2,
    "fig3": _fig3,
    "fig4": _fig4,
    "fig5": _fig5,
    "fig6": _fig6,
    "fig7": _fig7,
    "fig8": _fig8,
    "fig9": _fig9,
    "fig10": _fig10,
    "fig11": _fig11,
    "figliftall": _figliftall,
}


def reproduce_figure(fig_id: str, out_dir: Path, tol: float = ORACLE_TOL) -> list:
    """Write the CSV dataset(s) behind one figure; returns the paths."""
    if fig_id not in FIGURES:
        known = ", ".join(sorted(FIGURES))
        raise ConfigError(f"unknown figure id '{fig_id}' (known: {known})")
    return FIGURES[fig_id](Path(out_dir), tol)


# ---------------------------------------------------------------------------
# Acceptance suite
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    cid: str
    title: str
    passed: bool
    detail: str
    seconds: float


def _check_linear_exact():
    params = SystemParams(100.0, 5.0)
    shape = pulses.power_rise(1, 100.0, tau_end=1.0)
    r = asy.linear_lifting(params.omega)
    u = prop.propagate(params, shape, 0.0, 1.0, tol=1e-12)
    ua = prop.to_adiabatic_frame(u, params, shape, 0.0, 1.0)
    p_err = abs(abs(ua.u12) ** 2 - r.p_plus)
    eta = prop.dynamical_phase(params, shape, 0.0, 1.0)
    res_minus = abs(cmath.phase(ua.u11 * cmath.exp(-1j * (r.chi_minus + eta))))
    res_plus = abs(
        cmath.phase(-ua.u12.conjugate() * cmath.exp(1j * (r.chi_plus + eta)))
    )
    passed = p_err < 1e-4 and res_minus < 1e-3 and res_plus < 1e-3
    return passed, (
        f"|p+ err| = {p_err:.2e} (<1e-4); phase residuals "
        f"{res_minus:.2e}/{res_plus:.2e} rad (<1e-3)"
    )


def _check_half_lz():
    worst = 0.0
    for omega in (0.1, 0.35, 1.0, 2.0):
        d = omega * math.sqrt(200.0)
        params = SystemParams(100.0, d)
        shape = pulses.power_rise(1, 100.0, tau_end=1.5)
        for t_big in (0.5, 1.0, 2.0, 3.5, 5.0, 7.5, 10.0):
            tau = t_big / math.sqrt(50.0)
            u_ode = prop.lz_frame(prop.propagate(params, shape, 0.0, tau, tol=1e-12))
            u = asy.half_lz_exact(omega, t_big)
            worst = max(worst, abs(u.u11 - u_ode.u11), abs(u.u12 - u_ode.u12))
    return worst < 1e-8, f"max entry error = {worst:.2e} (<1e-8)"


def _check_exponential():
    worst = 0.0
    shape = pulses.exponential(100.0)
    tau_a = math.log(1e-6 / 100.0)
    for d in (0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0):
        r = asy.exponential_lifting(d, zeta=50.0, s_i=1e-6)
        params = SystemParams(100.0, d)
        oracle = _adiabatic_pplus(params, shape, tau_a, 0.0, 1e-12)
        worst = max(worst, abs(oracle - r.p_plus))
    invariant = all(
        asy.exponential_lifting(0.4, zeta=0.5 * w, s_i=1e-6).p_plus
        == asy.exponential_lifting(0.4, zeta=25.0, s_i=1e-6).p_plus
        for w in (50.0, 100.0, 500.0)
    )
    kummer_worst = 0.0
    params = SystemParams(100.0, 0.4)
    shape = pulses.exponential(100.0)
    for tau_a, tau_b in ((-8.0, 0.0), (-6.0, -1.0), (-10.0, -3.0)):
        s_a, s_b = 100.0 * math.exp(tau_a), 100.0 * math.exp(tau_b)
        u = asy.exponential_exact(0.4, s_b).compose(
            asy.exponential_exact(0.4, s_a).dagger()
        )
        u_ode = prop.propagate(params, shape, tau_a, tau_b, tol=1e-13)
        kummer_worst = max(
            kummer_worst, abs(u.u11 - u_ode.u11), abs(u.u12 - u_ode.u12)
        )
    passed = worst < 1e-3 and invariant and kummer_worst < 1e-7
    return passed, (
        f"max p+ error = {worst:.2e} (<1e-3); coupling-invariant: {invariant}; "
        f"Kummer operator max entry error = {kummer_worst:.2e} (<1e-7)"
    )


def _check_small_detuning():
    h = 1e-3
    slope = (asy.linear_lifting(h).p_plus - 0.5) / h
    slope_err = abs(slope - (-math.sqrt(math.pi / 8.0)))
    k1 = asy.k_n_constant(1, 100.0)
    k1_err = abs(k1 - 0.5 * math.sqrt(math.pi / 100.0))
    exp_err = abs(
        asy.small_detuning_transfer(Kind.EXPONENTIAL, 1, 0.05, 100.0).p_plus
        - 0.5 * (1.0 - math.pi * 0.05 / 2.0)
    )
    hp = 1e-4
    exp_slope = (asy.exponential_lifting(hp, zeta=50.0, s_i=1e-6).p_plus - 0.5) / hp
    exp_slope_err = abs(exp_slope - (-math.pi / 4.0))
    passed = (
        slope_err < 1e-4 and k1_err < 1e-15 and exp_err < 1e-12
        and exp_slope_err < 1e-3
    )
    return passed, (
        f"linear slope err = {slope_err:.2e} (<1e-4); K_1 err = {k1_err:.1e}; "
        f"exponential first-order errs = {exp_err:.1e}/{exp_slope_err:.2e}"
    )


def _check_universal():
    worst = 0.0
    shape = pulses.power_rise(2, 100.0, tau_end=3.0)
    for d in np.linspace(0.0, 20.0, 21):
        params = SystemParams(100.0, float(d), n=2)
        p = asy.universal_lifting(2, float(d), 100.0).p_plus
        worst = max(worst, abs(_adiabatic_pplus(params, shape, 0.0, 3.0, 1e-11) - p))
    phase_worst = 0.0
    shape3 = pulses.power_rise(3, 100.0, tau_end=2.5)
    for d in (1.0, 3.0, 6.0, 9.0):
        params = SystemParams(100.0, d, n=3)
        u = prop.propagate(params, shape3, 0.0, 2.5, tol=1e-11)
        _, a_plus = _split_amplitudes(params, shape3, 2.5, u)
        r = asy.universal_lifting(3, d, 100.0)
        eta = prop.dynamical_phase(params, shape3, 0.0, 2.5)
        res = abs(cmath.phase(a_plus * cmath.exp(1j * (r.chi_plus + eta))))
        phase_worst = max(phase_worst, res)
    passed = worst <= 0.02 and phase_worst <= 0.15
    return passed, (
        f"n=2 max |p+ err| = {worst:.4f} (<=0.02); "
        f"n=3 max arg A+ residual = {phase_worst:.3f} rad (<=0.15)"
    )


def _check_large_detuning():
    # the stated range starts at d = 5, which is below the formula's own
    # alpha floor (alpha_2(5) = 1.12 vs 3); the 20% band is entered only
    # at d ~ 5.3, so the left edge fails and the detail reports where the
    # claim does hold
    worst_rel, entry = 0.0, None
    shape = pulses.power_rise(2, 100.0, tau_end=3.0)
    for d in np.linspace(5.0, 20.0, 31):
        params = SystemParams(100.0, float(d), n=2)
        p = asy.large_detuning_transfer(2, params.alpha_n, enforce_floor=False).p_plus
        oracle = _adiabatic_pplus(params, shape, 0.0, 3.0, 1e-11)
        rel = abs(p - oracle) / oracle
        worst_rel = max(worst_rel, rel)
        if entry is None and rel <= 0.20:
            entry = float(d)
    alphas = np.linspace(4.0, 12.0, 9)
    mags = [abs(asy.large_detuning_transfer(2, float(a)).s_n) ** 2 for a in alphas]
    slope = np.polyfit(np.log(alphas), np.log(mags), 1)[0]
    slope_err = abs(slope - (-4.0)) / 4.0
    passed = worst_rel <= 0.20 and slope_err <= 0.05
    return passed, (
        f"n=2 max relative error over d in [5, 20] = {worst_rel:.3f} (<=0.20), "
        f"all from the left edge: within 20% from d = {entry:g} on; "
        f"|S_2|^2 log-log slope = {slope:.4f} vs -4 ({slope_err:.2%} off, <=5%)"
    )


def _check_rosen_zener():
    # the stated +-12 window leaves a ~3e-5 truncation bias in the oracle
    # itself, so the oracle integrates over the declared support (~ +-19
    # at the 1e-8 envelope cutoff) where its bias is ~1e-8
    worst = 0.0
    for w in np.linspace(0.2, 3.0, 20):
        shape = pulses.sech(float(w))
        lo, hi = pulses.support(shape)
        for d in np.linspace(0.0, 2.0, 20):
            params = SystemParams(float(w), float(d))
            u = prop.propagate(params, shape, lo, hi, tol=1e-10)
            worst = max(
                worst,
                abs(abs(u.u12) ** 2 - lsh.rosen_zener(float(w), float(d)).p_transfer),
            )
    return worst < 1e-6, (
        f"max |P err| over 20x20 grid = {worst:.2e} (<1e-6; oracle window "
        f"= declared support, not +-12, which would bias it by ~3e-5)"
    )


def _check_trig_lineshapes():
    cases = ((1, math.pi / 2.0), (2, 2.0), (2, 6.0))
    details = []
    passed = True
    for n, w in cases:
        shape = pulses.trig_power(n, w)
        worst = 0.0
        for d in np.linspace(0.0, 6.0, 31):
            params = SystemParams(w, float(d), n=n)
            u = prop.propagate(params, shape, 0.0, math.pi, tol=1e-11)
            pt = lsh.trig_lineshape(n, w, float(d))
            worst = max(worst, abs(pt.p_transfer - abs(u.u12) ** 2))
        details.append(f"n={n} w0={w:g}: max |P err| = {worst:.4f}")
        passed = passed and worst <= 0.05
    phase_ok = all(
        lsh.trig_lineshape(1, math.pi / 2.0, float(d)).b_plus.real == 0.0
        for d in np.linspace(0.0, 6.0, 13)
    )
    passed = passed and phase_ok
    details.append(f"n=1 B+ purely imaginary: {phase_ok}")
    return passed, "; ".join(details) + " (each <=0.05)"


def _check_half_scrap():
    pow2 = pulses.power_rise(2, 100.0, tau_end=3.0)
    exact = (
        lsh.half_scrap(Sequence.STARK_PUMP, pow2, 100.0, 0.0).p_plus_final == 0.5
        and lsh.half_scrap(Sequence.PUMP_STARK, pow2, 100.0, 0.0).p_plus_final == 0.5
    )
    gauss_sp = lsh.half_scrap(Sequence.STARK_PUMP, pulses.gaussian(100.0), 100.0, 0.0)
    gauss_ps = lsh.half_scrap(Sequence.PUMP_STARK, pulses.gaussian(100.0), 100.0, 0.0)
    numeric_err = max(
        abs(gauss_sp.p_plus_final - 0.5), abs(gauss_ps.p_plus_final - 0.5)
    )
    doubled = lsh.half_scrap(Sequence.STARK_PUMP, pulses.gaussian(200.0), 200.0, 0.0)
    phase_shift = abs(abs(doubled.relative_phase) - abs(gauss_sp.relative_phase))
    worst = 0.0
    for n in (2, 4):
        shape = pulses.power_rise(n, 100.0, tau_end=3.0)
        for d in np.linspace(0.25, 20.0, 12):
            res = lsh.half_scrap(Sequence.STARK_PUMP, shape, 100.0, float(d))
            params = SystemParams(100.0, float(d), n=n)
            oracle = _adiabatic_pplus(params, shape, 0.0, 3.0, 1e-11)
            worst = max(worst, abs(res.p_plus_final - oracle))
    passed = exact and numeric_err < 1e-3 and phase_shift < 1e-6 and worst <= 0.02
    return passed, (
        f"resonance p exactly 1/2 (analytic): {exact}; numeric |p-1/2| = "
        f"{numeric_err:.1e} (<1e-3); stark-pump phase shift under T0 doubling = "
        f"{phase_shift:.1e}; power n=2,4 lifting curves max err = {worst:.4f} (<=0.02)"
    )


def _check_properties():
    rng = np.random.default_rng(2026)
    tol = 1e-10
    worst_unitarity = 0.0
    for _ in range(200):
        kind = rng.choice(["power", "exponential", "trig", "sech"])
        w = float(rng.uniform(2.0, 120.0))
        d = float(rng.uniform(0.0, 8.0))
        if kind == "power":
            n = int(rng.integers(1, 5))
            shape = pulses.power_rise(n, w, tau_end=float(rng.uniform(0.5, 2.0)))
            window = (0.0, shape.tau_end)
        elif kind == "exponential":
            shape = pulses.exponential(w, 1, tau_end=0.0)
            window = (float(rng.uniform(-9.0, -4.0)), 0.0)
        elif kind == "trig":
            n = int(rng.integers(1, 4))
            shape = pulses.trig_power(n, w)
            window = (0.0, math.pi)
        else:
            shape = pulses.sech(w)
            window = (-10.0, 10.0)
        params = SystemParams(w, d, n=shape.n)
        u = prop.propagate(params, shape, window[0], window[1], tol=tol)
        worst_unitarity = max(worst_unitarity, u.unitarity_defect)

    complements = all(
        asy.linear_lifting(float(w)).p_minus + asy.linear_lifting(float(w)).p_plus == 1.0
        for w in rng.uniform(0.0, 5.0, size=50)
    ) and all(
        asy.exponential_lifting(float(d), zeta=50.0, s_i=1e-6).p_minus
        + asy.exponential_lifting(float(d), zeta=50.0, s_i=1e-6).p_plus == 1.0
        for d in rng.uniform(0.0, 4.0, size=50)
    ) and all(
        asy.universal_lifting(n, float(d), 100.0).p_minus
        + asy.universal_lifting(n, float(d), 100.0).p_plus == 1.0
        for n in (1, 2, 3, 4)
        for d in rng.uniform(0.0, 20.0, size=12)
    )

    worst_reversal = 0.0
    for _ in range(10):
        n = int(rng.integers(1, 4))
        w = float(rng.uniform(10.0, 120.0))
        d = float(rng.uniform(0.3, 6.0))
        t_end = float(rng.uniform(0.8, 2.0))
        rise = pulses.power_rise(n, w, tau_end=t_end)
        fall = pulses.power_fall(n, w, tau_start=-t_end, tau_end=0.0)
        params = SystemParams(w, d, n=n)
        u_rise = prop.to_adiabatic_frame(
            prop.propagate(params, rise, 0.0, t_end, tol=1e-12),
            params, rise, 0.0, t_end,
        )
        u_fall = prop.to_adiabatic_frame(
            prop.propagate(params, fall, -t_end, 0.0, tol=1e-12),
            params, fall, -t_end, 0.0,
        )
        expected = u_rise.transpose()
        worst_reversal = max(
            worst_reversal,
            abs(u_fall.u11 - expected.u11),
            abs(u_fall.u12 - expected.u12),
        )
    for _ in range(6):
        w = float(rng.uniform(20.0, 150.0))
        d = float(rng.uniform(0.2, 2.5))
        rise = pulses.exponential(w, 1, tau_end=0.0)
        fall = pulses.exponential(w, -1, tau_start=0.0)
        params = SystemParams(w, d)
        u_rise = prop.to_adiabatic_frame(
            prop.propagate(params, rise, -9.0, 0.0, tol=1e-12),
            params, rise, -9.0, 0.0,
        )
        u_fall = prop.to_adiabatic_frame(
            prop.propagate(params, fall, 0.0, 9.0, tol=1e-12),
            params, fall, 0.0, 9.0,
        )
        expected = u_rise.transpose()
        worst_reversal = max(
            worst_reversal,
            abs(u_fall.u11 - expected.u11),
            abs(u_fall.u12 - expected.u12),
        )

    from . import specfun

    gamma_id = abs(
        cmath.exp(specfun.log_gamma(0.3 + 0.7j) + specfun.log_gamma(0.7 - 0.7j))
        - math.pi / cmath.sin(math.pi * (0.3 + 0.7j))
    )
    # Kummer ODE residual s M'' + (b - s) M' - a M at a sample point
    varpi = 0.8
    a, b = 0.5j * varpi, 1j * varpi
    h = 1e-4
    s0 = 2.0
    m = [specfun.kummer_M(a, b, 1j * (s0 + k * h)) for k in (-1, 0, 1)]
    d1 = (m[2] - m[0]) / (2.0 * h * 1j)
    d2 = (m[2] - 2.0 * m[1] + m[0]) / (h * h * -1.0)
    residual = abs(1j * s0 * d2 + (b - 1j * s0) * d1 - a * m[1])

    passed = (
        worst_unitarity < 10.0 * tol
        and complements
        and worst_reversal < 1e-9
        and gamma_id < 1e-12
        and residual < 1e-6
    )
    return passed, (
        f"unitarity defect over 200 scenarios = {worst_unitarity:.1e} (<1e-9); "
        f"p- + p+ == 1 identically: {complements}; time-reversal max entry err = "
        f"{worst_reversal:.1e} (<1e-9); reflection identity = {gamma_id:.1e}; "
        f"Kummer ODE residual = {residual:.1e}"
    )


ACCEPTANCE_CHECKS = (
    ("C1", "linear-rising exact asymptotics", _check_linear_exact),
    ("C2", "half Landau-Zener exact operator", _check_half_lz),
    ("C3", "exponential edge: splitting and Kummer operator", _check_exponential),
    ("C4", "small-detuning first order", _check_small_detuning),
    ("C5", "universal splitting formula", _check_universal),
    ("C6", "large-detuning perturbation theory", _check_large_detuning),
    ("C7", "Rosen-Zener lineshape", _check_rosen_zener),
    ("C8", "trig lineshapes", _check_trig_lineshapes),
    ("C9", "Half-SCRAP superpositions", _check_half_scrap),
    ("C10", "property suite", _check_properties),
)


def run_acceptance(echo=None) -> list:
    """Run the ten acceptance criteria; one CheckResult each."""
    results = []
    for cid, title, fn in ACCEPTANCE_CHECKS:
        start = time.perf_counter()
        try:
            passed, detail = fn()
        except Exception as exc:  # a crash is a failure, not an abort
            passed, detail = False, f"raised {type(exc).__name__}: {exc}"
        seconds = time.perf_counter() - start
        result = CheckResult(cid, title, passed, detail, seconds)
        results.append(result)
        if echo is not None:
            echo(format_check(result))
    return results


def format_check(r: CheckResult) -> str:
    status = "PASS" if r.passed else "FAIL"
    return f"[{status}] {r.cid} {r.title}: {r.detail} [{r.seconds:.1f}s]"


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twolevel",
        description="Two-level dynamics scenario runner and figure harness.",
    )
    parser.add_argument(
        "--out-dir",
        default=None,
        help=f"output directory (default: ${OUT_DIR_ENV} or the working directory)",
    )
    parser.add_argument(
        "--tol", type=float, default=ORACLE_TOL,
        help="ODE oracle tolerance (default %(default)g)",
    )
    parser.add_argument(
        "--workers", type=int, default=1,
        help="concurrent sweep rows (default %(default)s)",
    )
    parser.add_argument(
        "--format", choices=("csv", "json"), default="csv",
        help="report format for run/sweep (default %(default)s)",
    )
    sub = parser.add_subparsers(dest="verb", required=True)
    run_p = sub.add_parser("run", help="execute a scenario config")
    run_p.add_argument("config", type=Path)
    sweep_p = sub.add_parser("sweep", help="execute a scenario that must sweep")
    sweep_p.add_argument("config", type=Path)
    fig_p = sub.add_parser("figure", help="write the dataset behind a figure")
    fig_p.add_argument("id", help="fig1..fig11 or figliftall")
    sub.add_parser("validate", help="run the acceptance suite")
    return parser


def _resolve_out_dir(arg: str | None) -> Path:
    if arg is not None:
        return Path(arg)
    env = os.environ.get(OUT_DIR_ENV)
    return Path(env) if env else Path.cwd()


def _cmd_run(args, require_sweep: bool) -> int:
    try:
        scenario = load_scenario(args.config)
        if require_sweep and scenario.sweep is None:
            raise ConfigError("sweep: this verb needs a [sweep] table in the config")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.workers < 1:
        print("config error: --workers must be >= 1", file=sys.stderr)
        return EXIT_CONFIG

    report = run_scenario(scenario, tol=args.tol, workers=args.workers)
    out_dir = _resolve_out_dir(args.out_dir)
    suffix = "json" if args.format == "json" else "csv"
    target = scenario.output or f"{scenario.name}.{suffix}"
    path = out_dir / target
    write_report(report, path, args.format)

    failed_rows = sum(1 for r in report.rows if r.failed)
    errs = ", ".join(
        f"{name}: {err:.3e}" if err is not None else f"{name}: n/a"
        for name, err in report.max_abs_error.items()
    )
    print(f"scenario {scenario.name}: {len(report.rows)} rows -> {path}")
    print(f"max_abs_error {errs}")
    for flag in report.regime_flags:
        print(f"regime: {flag}")
    if failed_rows:
        print(f"{failed_rows} row(s) failed to integrate", file=sys.stderr)
        return EXIT_NUMERIC
    if report.breached(scenario.max_abs_error):
        print(
            f"threshold breach: max_abs_error > {scenario.max_abs_error:g}",
            file=sys.stderr,
        )
        return EXIT_THRESHOLD
    return EXIT_OK


def _cmd_figure(args) -> int:
    out_dir = _resolve_out_dir(args.out_dir)
    try:
        paths = reproduce_figure(args.id, out_dir, tol=args.tol)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IntegrationError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    for path in paths:
        print(path)
    return EXIT_OK


def _cmd_validate() -> int:
    results = run_acceptance(echo=print)
    passed = sum(1 for r in results if r.passed)
    print(f"{passed}/{len(results)} acceptance criteria passed")
    return EXIT_OK if passed == len(results) else EXIT_THRESHOLD


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.verb == "run":
        return _cmd_run(args, require_sweep=False)
    if args.verb == "sweep":
        return _cmd_run(args, require_sweep=True)
    if args.verb == "figure":
        return _cmd_figure(args)
    return _cmd_validate()


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
