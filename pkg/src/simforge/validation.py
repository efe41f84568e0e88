"""Static and dynamic checks plus analytical oracles.

Reports are the evidence a human expert reviews before signing off: every
check is pure given its inputs, statuses are pass/fail/skip, and the overall
verdict is pass exactly when nothing failed. Dynamic checks re-derive the
simulation logic from the recorded trace (demand stream, markers, event
steps) rather than trusting the program that produced it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from . import engines
from .codegen import SECTION_HEADERS
from .ir import SimulationSpec, StopKind, validate_spec
from .simscript import BUILTINS, OUTPUT_BUILTINS, Program, RunResult, static_check

_EXPECTED_BUILTINS = frozenset({
    "rand_uniform", "rand_uniform_int", "rand_exp", "floor",
    "record", "mark_event", "plot_decl",
})
_EXPECTED_OUTPUTS = frozenset({"record", "mark_event", "plot_decl"})

LITTLE_MIN_DEPARTURES = 10_000
LITTLE_TOLERANCE = 0.05
DISTRIBUTION_TOLERANCE = 0.05
_FLOAT_TOL = 1e-9


class CheckStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    SKIP = "skip"


@dataclass(frozen=True)
class Check:
    check_id: str
    status: CheckStatus
    detail: str = ""
    measured: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[Check, ...]

    @property
    def overall(self) -> bool:
        return all(c.status is not CheckStatus.FAIL for c in self.checks)

    def check(self, check_id: str) -> Check:
        for c in self.checks:
            if c.check_id == check_id:
                return c
        raise KeyError(check_id)

    def to_dict(self) -> dict:
        return {
            "overall": "pass" if self.overall else "fail",
            "checks": [
                {"check_id": c.check_id, "status": c.status.value,
                 "detail": c.detail, "measured": c.measured}
                for c in self.checks
            ],
        }

    @staticmethod
    def from_dict(data: dict) -> "ValidationReport":
        return ValidationReport(tuple(
            Check(c["check_id"], CheckStatus(c["status"]), c.get("detail", ""),
                  c.get("measured", {}))
            for c in data["checks"]
        ))


class Unstable(Exception):
    def __init__(self, rho: float):
        super().__init__(f"queue is unstable: utilization {rho:.3f} >= 1")
        self.rho = rho


@dataclass(frozen=True)
class MM1Stats:
    rho: float
    L: float
    W: float


def analytical_mm1(arrival_rate: float, service_rate: float) -> MM1Stats:
    """Closed-form M/M/1 steady state: rho = lam/mu, L = rho/(1-rho), W = 1/(mu-lam)."""
    if arrival_rate <= 0 or service_rate <= 0:
        raise ValueError("rates must be positive")
    rho = arrival_rate / service_rate
    if rho >= 1:
        raise Unstable(rho)
    return MM1Stats(rho=rho, L=rho / (1.0 - rho), W=1.0 / (service_rate - arrival_rate))


# ---------------------------------------------------------------------------
# static checks


def check_static(artifact: Program | SimulationSpec, source: str | None = None) -> ValidationReport:
    """Pre-execution gate: spec invariants, or program static analysis."""
    checks: list[Check] = []
    if isinstance(artifact, SimulationSpec):
        outcome = validate_spec(artifact)
        if outcome.ok:
            checks.append(Check("spec.invariants", CheckStatus.PASS))
        else:
            checks.append(Check("spec.invariants", CheckStatus.FAIL,
                                detail="; ".join(map(str, outcome.violations))))
        return ValidationReport(tuple(checks))

    report = static_check(artifact)
    checks.append(Check(
        "static.use_before_assign",
        CheckStatus.PASS if not report.violations else CheckStatus.FAIL,
        detail="; ".join(map(str, report.violations))))
    checks.append(Check(
        "static.termination_lint",
        CheckStatus.PASS if not report.warnings else CheckStatus.FAIL,
        detail="; ".join(map(str, report.warnings))))

    builtin_ok = frozenset(BUILTINS) == _EXPECTED_BUILTINS and OUTPUT_BUILTINS == _EXPECTED_OUTPUTS
    checks.append(Check(
        "static.builtin_audit",
        CheckStatus.PASS if builtin_ok else CheckStatus.FAIL,
        detail="" if builtin_ok else f"builtin table drifted: {sorted(BUILTINS)}"))

    if source is None:
        checks.append(Check("static.sections", CheckStatus.SKIP, detail="no source text supplied"))
    else:
        positions = [source.find(h) for h in SECTION_HEADERS]
        ordered = all(p >= 0 for p in positions) and positions == sorted(positions)
        checks.append(Check(
            "static.sections",
            CheckStatus.PASS if ordered else CheckStatus.FAIL,
            detail="" if ordered else "expected the four section headers in order"))
    return ValidationReport(tuple(checks))


# ---------------------------------------------------------------------------
# trace plumbing


def _series_map(result: RunResult, name: str) -> list[tuple[float, float]]:
    return result.series.get(name, [])


def _marker_days(result: RunResult) -> list[float]:
    return [x for name, x in result.events if name == "replenishment"]


def _arrivals_departures(size_series: list[tuple[float, float]]) -> tuple[list[float], list[float]]:
    arrivals: list[float] = []
    departures: list[float] = []
    prev = size_series[0][1]
    for t, size in size_series[1:]:
        if size == prev + 1:
            arrivals.append(t)
        elif size == prev - 1:
            departures.append(t)
        prev = size
    return arrivals, departures


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= _FLOAT_TOL * max(1.0, abs(a), abs(b))


def compute_summary(result: RunResult, spec: SimulationSpec | None = None) -> dict[str, float]:
    """Summary statistics derived purely from the recorded series.

    Matches the accumulator-based summaries the engines produce; used to give
    interpreter runs (which record only series) comparable summary stats.
    """
    if "on_hand" in result.series:
        on_hand = [y for _, y in result.series["on_hand"]]
        demand = [y for _, y in _series_map(result, "demand")]
        fulfilled = [y for _, y in _series_map(result, "fulfilled")]
        total_demand = float(sum(demand))
        total_fulfilled = float(sum(fulfilled))
        days = on_hand[1:] if len(on_hand) > 1 else on_hand
        return {
            "final_on_hand": float(on_hand[-1]) if on_hand else 0.0,
            "total_demand": total_demand,
            "total_fulfilled": total_fulfilled,
            "total_lost": total_demand - total_fulfilled,
            "replenishments": float(len(_marker_days(result))),
            "mean_on_hand": (sum(days) / len(days)) if days else 0.0,
            "fill_rate": (total_fulfilled / total_demand) if total_demand > 0 else 1.0,
        }

    size_series = _series_map(result, "system_size")
    if not size_series:
        return {}
    waits = [y for _, y in _series_map(result, "wait")]
    sojourns = [y for _, y in _series_map(result, "sojourn")]
    departures = len(sojourns)
    last_t = size_series[-1][0]
    if spec is not None and spec.queue is not None and spec.queue.stop.kind is StopKind.TIME:
        elapsed = spec.queue.stop.value
    else:
        elapsed = last_t

    area = 0.0
    busy = 0.0
    for (t0, size), (t1, _) in zip(size_series, size_series[1:]):
        dt = t1 - t0
        area += size * dt
        if size > 0:
            busy += dt
    closing = elapsed - last_t
    if closing > 0:
        final_size = size_series[-1][1]
        area += final_size * closing
        if final_size > 0:
            busy += closing

    arrivals, _ = _arrivals_departures(size_series)
    return {
        "arrivals": float(len(arrivals)),
        "departures": float(departures),
        "elapsed": elapsed,
        "mean_wait": (sum(waits) / len(waits)) if waits else 0.0,
        "mean_sojourn": (sum(sojourns) / departures) if departures else 0.0,
        "time_avg_system_size": (area / elapsed) if elapsed > 0 else 0.0,
        "utilization": (busy / elapsed) if elapsed > 0 else 0.0,
        "effective_arrival_rate": (departures / elapsed) if elapsed > 0 else 0.0,
    }


# ---------------------------------------------------------------------------
# dynamic checks


def _check_inventory_dynamic(result: RunResult, spec: SimulationSpec) -> list[Check]:
    inv = spec.inventory
    assert inv is not None
    checks: list[Check] = []

    on_hand = _series_map(result, "on_hand")
    demand = _series_map(result, "demand")
    fulfilled = _series_map(result, "fulfilled")
    lost = _series_map(result, "lost")
    markers = _marker_days(result)

    horizon = inv.horizon
    shape_ok = (
        [x for x, _ in on_hand] == [float(d) for d in range(0, horizon + 1)]
        and [x for x, _ in demand] == [float(d) for d in range(1, horizon + 1)]
        and len(fulfilled) == horizon and len(lost) == horizon
    )
    checks.append(Check(
        "inv.series_shape",
        CheckStatus.PASS if shape_ok else CheckStatus.FAIL,
        detail="" if shape_ok else
        f"expected on_hand over days 0..{horizon} and demand/fulfilled/lost over days "
        f"1..{horizon}; got point counts {len(on_hand)}/{len(demand)}/{len(fulfilled)}/{len(lost)}"))
    if not shape_ok:
        return checks

    received = {int(day): 0 for day in range(1, horizon + 1)}
    marker_days_int = []
    markers_ok = True
    for day in markers:
        if day != int(day) or not 1 <= int(day) <= horizon:
            markers_ok = False
            break
        received[int(day)] += inv.order_quantity
        marker_days_int.append(int(day))

    conservation_ok = markers_ok
    conservation_detail = "" if markers_ok else f"marker days outside 1..{horizon}: {markers}"
    if markers_ok:
        for t in range(1, horizon + 1):
            prev = on_hand[t - 1][1]
            d = demand[t - 1][1]
            got_f, got_lost, got_on = fulfilled[t - 1][1], lost[t - 1][1], on_hand[t][1]
            if inv.lead_time == 0:
                stock_before = prev
                expect_f = min(d, stock_before)
                expect_on = stock_before - expect_f + received[t]
            else:
                stock_before = prev + received[t]
                expect_f = min(d, stock_before)
                expect_on = stock_before - expect_f
            if got_f != expect_f or got_on != expect_on or got_lost != d - expect_f:
                conservation_ok = False
                conservation_detail = (
                    f"day {t}: expected fulfilled={expect_f} on_hand={expect_on} "
                    f"lost={d - expect_f}, got fulfilled={got_f} on_hand={got_on} lost={got_lost}")
                break
    checks.append(Check(
        "inv.conservation",
        CheckStatus.PASS if conservation_ok else CheckStatus.FAIL,
        detail=conservation_detail))

    negatives = [
        (name, x, y)
        for name, series in (("on_hand", on_hand), ("fulfilled", fulfilled), ("lost", lost))
        for x, y in series if y < 0
    ]
    checks.append(Check(
        "inv.non_negative",
        CheckStatus.PASS if not negatives else CheckStatus.FAIL,
        detail="" if not negatives else f"negative values: {negatives[:3]}"))

    # forward replay of the (s, Q) policy over the recorded demand stream:
    # the marker set must match the receipts the policy implies
    expected_markers: list[int] = []
    stock = inv.initial_inventory
    outstanding = 0
    arrival_day = 0
    for t in range(1, horizon + 1):
        d = demand[t - 1][1]
        if outstanding > 0 and arrival_day == t:
            stock += inv.order_quantity
            outstanding = 0
            expected_markers.append(t)
        take = d if d <= stock else stock
        stock -= take
        if outstanding == 0 and stock <= inv.reorder_point:
            if inv.lead_time == 0:
                stock += inv.order_quantity
                expected_markers.append(t)
            else:
                outstanding = inv.order_quantity
                arrival_day = t + inv.lead_time
    timing_ok = markers_ok and marker_days_int == expected_markers
    checks.append(Check(
        "inv.order_timing",
        CheckStatus.PASS if timing_ok else CheckStatus.FAIL,
        detail="" if timing_ok else
        f"policy replay expects replenishment days {expected_markers}, trace has {marker_days_int}",
        measured={"expected_markers": expected_markers, "markers": marker_days_int}))
    return checks


def _check_queue_dynamic(result: RunResult, spec: SimulationSpec) -> list[Check]:
    checks: list[Check] = []
    size_series = _series_map(result, "system_size")
    waits = _series_map(result, "wait")
    sojourns = _series_map(result, "sojourn")

    shape_ok = bool(size_series) and size_series[0][0] == 0 and size_series[0][1] == 0
    detail = "" if shape_ok else "system_size must start at (0, 0)"
    if shape_ok:
        prev_t, prev_size = size_series[0]
        for t, size in size_series[1:]:
            if t < prev_t or abs(size - prev_size) != 1 or size < 0:
                shape_ok = False
                detail = f"bad step at t={t}: size {prev_size} -> {size}"
                break
            prev_t, prev_size = t, size
    checks.append(Check(
        "q.series_shape", CheckStatus.PASS if shape_ok else CheckStatus.FAIL, detail=detail))
    if not shape_ok:
        return checks

    arrivals, departures = _arrivals_departures(size_series)
    counts_ok = len(waits) == len(departures) == len(sojourns)
    checks.append(Check(
        "q.departures_and_counts",
        CheckStatus.PASS if counts_ok else CheckStatus.FAIL,
        detail="" if counts_ok else
        f"departures={len(departures)} waits={len(waits)} sojourns={len(sojourns)} must be equal",
        measured={"arrivals": len(arrivals), "departures": len(departures)}))
    if not counts_ok:
        return checks

    fifo_ok = True
    fifo_detail = ""
    for k in range(len(departures)):
        arr = arrivals[k]
        dep = departures[k]
        expected_wait = max(0.0, departures[k - 1] - arr) if k > 0 else 0.0
        expected_sojourn = dep - arr
        got_wait = waits[k][1]
        got_sojourn = sojourns[k][1]
        if (waits[k][0] != k + 1 or sojourns[k][0] != k + 1
                or not _close(got_wait, expected_wait)
                or not _close(got_sojourn, expected_sojourn)):
            fifo_ok = False
            fifo_detail = (
                f"customer {k + 1}: expected wait {expected_wait!r} sojourn {expected_sojourn!r}, "
                f"recorded wait {got_wait!r} sojourn {got_sojourn!r}")
            break
    checks.append(Check(
        "q.fifo_discipline",
        CheckStatus.PASS if fifo_ok else CheckStatus.FAIL, detail=fifo_detail))

    summary = compute_summary(result, spec)
    n_dep = int(summary.get("departures", 0))
    if n_dep < LITTLE_MIN_DEPARTURES:
        checks.append(Check(
            "q.littles_law", CheckStatus.SKIP,
            detail=f"{n_dep} departures < {LITTLE_MIN_DEPARTURES} required for the steady-state check"))
    else:
        L = summary["time_avg_system_size"]
        lam_w = summary["effective_arrival_rate"] * summary["mean_sojourn"]
        rel = abs(L - lam_w) / L if L > 0 else float("inf")
        checks.append(Check(
            "q.littles_law",
            CheckStatus.PASS if rel <= LITTLE_TOLERANCE else CheckStatus.FAIL,
            detail=f"|L - lambda*W|/L = {rel:.4f}",
            measured={"L": L, "lambda_W": lam_w, "relative_gap": rel}))
    return checks


def check_dynamic(result: RunResult, spec: SimulationSpec) -> ValidationReport:
    """Trace-level invariants for a run claimed to implement the given spec."""
    try:
        if spec.inventory is not None:
            checks = _check_inventory_dynamic(result, spec)
        else:
            checks = _check_queue_dynamic(result, spec)
    except Exception as exc:  # fabricated traces can be arbitrarily malformed
        checks = [Check("dynamic.trace_readable", CheckStatus.FAIL,
                        detail=f"trace could not be analyzed: {exc}")]
    return ValidationReport(tuple(checks))


# ---------------------------------------------------------------------------
# oracle comparison


def _compare_exact(result: RunResult, oracle: RunResult) -> Check:
    if set(result.series) != set(oracle.series):
        return Check("oracle.trace_exact", CheckStatus.FAIL,
                     detail=f"series names differ: {sorted(result.series)} vs {sorted(oracle.series)}")
    for name in oracle.series:
        got = result.series[name]
        want = oracle.series[name]
        if len(got) != len(want):
            return Check("oracle.trace_exact", CheckStatus.FAIL,
                         detail=f"series {name!r}: {len(got)} points, oracle has {len(want)}")
        for i, (p, q) in enumerate(zip(got, want)):
            if p[0] != q[0] or p[1] != q[1]:
                return Check("oracle.trace_exact", CheckStatus.FAIL,
                             detail=f"series {name!r} point {i}: {p} != oracle {q}")
    got_events = [(n, float(x)) for n, x in result.events]
    want_events = [(n, float(x)) for n, x in oracle.events]
    if got_events != want_events:
        return Check("oracle.trace_exact", CheckStatus.FAIL,
                     detail=f"events differ: {got_events[:3]} vs {want_events[:3]}")
    return Check("oracle.trace_exact", CheckStatus.PASS)


_DISTRIBUTION_STATS = {
    "inventory": ("mean_on_hand", "total_demand", "total_fulfilled", "fill_rate"),
    "queue": ("mean_sojourn", "time_avg_system_size", "utilization", "effective_arrival_rate"),
}


def _compare_distribution(result: RunResult, oracle: RunResult, spec: SimulationSpec) -> Check:
    summary = compute_summary(result, spec)
    if not summary:
        return Check("oracle.distribution", CheckStatus.FAIL, detail="no recognizable series in trace")
    stats = _DISTRIBUTION_STATS[spec.kind.value]
    measured: dict = {}
    worst = 0.0
    worst_stat = ""
    for stat in stats:
        want = oracle.summary.get(stat, 0.0)
        got = summary.get(stat, 0.0)
        denom = max(abs(want), 1e-12)
        rel = abs(got - want) / denom
        measured[stat] = {"run": got, "oracle": want, "relative_diff": rel}
        if rel > worst:
            worst, worst_stat = rel, stat
    ok = worst <= DISTRIBUTION_TOLERANCE
    return Check(
        "oracle.distribution",
        CheckStatus.PASS if ok else CheckStatus.FAIL,
        detail=f"worst relative difference {worst:.4f} on {worst_stat or 'n/a'}",
        measured=measured)


def compare_to_oracle(result: RunResult, spec: SimulationSpec, seed: int) -> ValidationReport:
    """Re-run the reference engine and compare, exactly and at distribution level.

    Trace-contract programs (the emitter's output) must pass the exact check;
    an independent but faithful implementation will fail it while passing the
    distribution check, and the report shows both verdicts for the reviewer.
    """
    oracle = engines.run_spec(spec, seed)
    checks = (
        _compare_exact(result, oracle),
        _compare_distribution(result, oracle, spec),
    )
    return ValidationReport(checks)
