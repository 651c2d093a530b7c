"""Acceptance suite: every stated correctness criterion, one test each.

Each test runs one criterion from `twolevel.cli.ACCEPTANCE_CHECKS` (the
same functions the `twolevel validate` verb prints), echoes its one-line
pass/fail summary, and asserts both the verdict and the stated runtime
budget where one exists.

Two criteria fail by design rather than by bug, and stay red here on
purpose; the analytic formulas are implemented faithfully and simply do
not reach the demanded accuracy in the corner of parameter space the
criterion pins down:

* C6: the large-detuning perturbation series at n = 2 enters its 20%
  relative band only near T0*Delta0 ~ 5.3, while the stated range starts
  at exactly 5.0 (where the error is ~40%).  The source claim is hedged
  ("from approximately 5"), and the formula's own validity floor maps to
  T0*Delta0 ~ 9.7 there.
* C8: the sin^2 lineshape at T0*Omega0 = 2 misses the 0.05 band with a
  max error of ~0.070.  Swapping in ODE edge populations while keeping
  the analytic phases collapses the error below 0.01, isolating the
  shortfall in the universal edge-population asymptotics, which are far
  outside their validity scale at that coupling (adiabaticity measure
  ~4.7 against the ~20 the formula wants).  The same check passes at
  T0*Omega0 = 6 and for the n = 1 pulse.

Weakening the bounds would hide real information, so the numbers stand.
"""

import pytest

from twolevel import cli

# stated per-criterion wall-clock budgets, in seconds
BUDGETS = {"C1": 5.0, "C2": 30.0, "C3": 30.0, "C5": 120.0, "C7": 60.0}
SUITE_BUDGET = 600.0

_seconds: dict = {}


@pytest.mark.parametrize(
    "cid,title,fn",
    cli.ACCEPTANCE_CHECKS,
    ids=[c[0] for c in cli.ACCEPTANCE_CHECKS],
)
def test_criterion(cid, title, fn):
    result = _run_one(cid, title, fn)
    _seconds[cid] = result.seconds
    line = cli.format_check(result)
    print(line)
    if cid in BUDGETS:
        assert result.seconds < BUDGETS[cid], (
            f"{cid} exceeded its {BUDGETS[cid]:.0f}s budget: {result.seconds:.1f}s"
        )
    assert result.passed, line


def _run_one(cid, title, fn):
    import time

    start = time.perf_counter()
    try:
        passed, detail = fn()
    except Exception as exc:  # a crash is a failed criterion, not an error
        passed, detail = False, f"raised {type(exc).__name__}: {exc}"
    return cli.CheckResult(cid, title, passed, detail, time.perf_counter() - start)


def test_full_suite_runtime_budget():
    missing = [c[0] for c in cli.ACCEPTANCE_CHECKS if c[0] not in _seconds]
    if missing:
        pytest.skip(f"criteria not timed in this run: {missing}")
    total = sum(_seconds.values())
    print(f"acceptance suite total: {total:.1f}s (budget {SUITE_BUDGET:.0f}s)")
    assert total < SUITE_BUDGET
