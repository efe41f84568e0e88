"""Acceptance suite: one test per release criterion, each printing a verdict.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines. Tolerances and budgets are pinned here, not configurable.
"""

import random
import time
from contextlib import contextmanager

import pytest

from simforge.codegen import emit
from simforge.engines import run_inventory_detailed, run_queue, run_spec
from simforge.fixtures import DEMO_INVENTORY_DESCRIPTION, MARKER_PROSE
from simforge.ir import (
    DistributionSpec,
    InventoryParams,
    QueueParams,
    StopKind,
    StopRule,
    parse_canonical,
    serialize_canonical,
)
from simforge.promptkit import GenerationParams, check_budget
from simforge.simscript import interpret, parse_source
from simforge.validation import CheckStatus, check_dynamic
from simforge.workflow import (
    FrontendKind,
    SessionMode,
    SessionState,
    SessionStore,
    SimforgeConfig,
    Workflow,
    WrongState,
)

from .genspecs import random_inventory_spec, random_queue_spec, random_spec


@contextmanager
def criterion(number: int, name: str):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {number} {name}: FAIL")
        raise
    print(f"ACCEPTANCE {number} {name}: PASS")


def test_01_ir_round_trip_1000_specs():
    with criterion(1, "ir-round-trip"):
        rng = random.Random(20250810)
        started = time.monotonic()
        for _ in range(1000):
            spec = random_spec(rng)
            assert parse_canonical(serialize_canonical(spec)) == spec
        elapsed = time.monotonic() - started
        assert elapsed < 10.0, f"took {elapsed:.1f}s, budget 10s"


def test_02_codegen_engine_equivalence_200_pairs():
    with criterion(2, "codegen-engine-equivalence"):
        rng = random.Random(77)
        started = time.monotonic()
        for i in range(200):
            spec = random_inventory_spec(rng) if i % 2 == 0 else random_queue_spec(rng)
            mine = interpret(parse_source(emit(spec)), spec.seed)
            oracle = run_spec(spec)
            assert set(mine.series) == set(oracle.series), spec
            for name in oracle.series:
                got, want = mine.series[name], oracle.series[name]
                assert len(got) == len(want), (name, spec)
                for p, q in zip(got, want):
                    assert p[0] == q[0] and p[1] == q[1], (name, p, q, spec)
            assert [(n, float(x)) for n, x in mine.events] == \
                [(n, float(x)) for n, x in oracle.events], spec
        elapsed = time.monotonic() - started
        assert elapsed < 60.0, f"took {elapsed:.1f}s, budget 60s"


def test_03_inventory_invariants_500_fuzzed_runs():
    with criterion(3, "inventory-invariants"):
        rng = random.Random(1234)
        for _ in range(500):
            spec = random_inventory_spec(rng, max_horizon=80)
            inv = spec.inventory
            result, records = run_inventory_detailed(inv, spec.seed)

            # conservation + receipt bookkeeping, straight from the day records
            prev = inv.initial_inventory
            for r in records:
                stock_before = prev + (r.received if inv.lead_time > 0 else 0)
                assert r.fulfilled == min(r.demand, stock_before)
                assert r.on_hand_end == prev + r.received - r.fulfilled
                assert r.on_hand_end >= 0 and r.lost >= 0
                prev = r.on_hand_end
            assert prev == inv.initial_inventory + \
                sum(r.received for r in records) - sum(r.fulfilled for r in records)

            # every placed order arrives exactly lead_time days later, full
            placements = [r.day for r in records if r.order_placed]
            receipts = [r.day for r in records if r.received > 0]
            assert receipts == [d + inv.lead_time for d in placements
                                if d + inv.lead_time <= inv.horizon]
            assert all(r.received in (0, inv.order_quantity) for r in records)

            # and the trace-level checks agree
            report = check_dynamic(result, spec)
            assert report.overall, [c for c in report.checks
                                    if c.status is CheckStatus.FAIL]


def test_04_deterministic_inventory_oracle():
    with criterion(4, "inventory-hand-trace"):
        # hand trace (pre-build): 100 - 10/day; day 7 closes at 30 <= s, order
        # placed; arrives morning of day 9 -> 20 + 50 - 10 = 60; day 10 -> 50
        params = InventoryParams(100, 30, 50, 2, DistributionSpec.constant(10), 10)
        result, records = run_inventory_detailed(params, seed=0)
        assert [r.day for r in records if r.order_placed] == [7]
        assert [r.day for r in records if r.received > 0] == [9]
        assert records[-1].on_hand_end == 50
        assert result.events == [("replenishment", 9)]


def test_05_queueing_oracle_mm1_half_load():
    with criterion(5, "mm1-closed-form"):
        params = QueueParams(
            interarrival=DistributionSpec.exponential(2.0),
            service=DistributionSpec.exponential(1.0),
            stop=StopRule(StopKind.CUSTOMERS, 200_000))
        started = time.monotonic()
        summary = run_queue(params, seed=424242, record_series=False).summary
        elapsed = time.monotonic() - started
        # independently derived closed form: rho = 0.5, L = rho/(1-rho) = 1.0,
        # W = 1/(mu - lambda) = 1/(1 - 0.5) = 2.0
        assert abs(summary["time_avg_system_size"] - 1.0) <= 0.05
        assert abs(summary["mean_sojourn"] - 2.0) / 2.0 <= 0.05
        assert elapsed < 60.0, f"took {elapsed:.1f}s, budget 60s"


def test_06_littles_law_20_stable_configurations():
    with criterion(6, "littles-law"):
        rng = random.Random(6060)
        for _ in range(20):
            mean_ia = rng.uniform(1.0, 3.0)
            rho = rng.uniform(0.3, 0.8)
            mean_sv = rho * mean_ia
            if rng.random() < 0.5:
                ia = DistributionSpec.exponential(mean_ia)
                sv = DistributionSpec.exponential(mean_sv)
            else:
                ia = DistributionSpec.uniform_real(0.5 * mean_ia, 1.5 * mean_ia)
                sv = DistributionSpec.uniform_real(0.5 * mean_sv, 1.5 * mean_sv)
            params = QueueParams(interarrival=ia, service=sv,
                                 stop=StopRule(StopKind.CUSTOMERS, 10_000))
            summary = run_queue(params, rng.getrandbits(64), record_series=False).summary
            assert summary["departures"] >= 10_000
            L = summary["time_avg_system_size"]
            lam_w = summary["effective_arrival_rate"] * summary["mean_sojourn"]
            assert L > 0
            assert abs(L - lam_w) / L <= 0.05, (params, summary)


def _drive_gated_inventory(root):
    config = SimforgeConfig(store_dir=root, backend="mock")
    wf = Workflow(SessionStore(root), config)
    session = wf.submit_description(DEMO_INVENTORY_DESCRIPTION, SessionMode.GATED,
                                    FrontendKind.LLM)
    session = wf.generate(session.id)
    assert session.state is SessionState.GENERATED
    assert session.static_report["overall"] == "pass"

    with pytest.raises(WrongState):
        wf.execute(session.id)

    session = wf.approve(session.id, "expert", "approve", "parameters check out")
    session = wf.execute(session.id)
    assert session.state is SessionState.EXECUTED
    session = wf.verify(session.id)
    assert session.state is SessionState.VERIFIED
    dynamic = wf.store.read_report(session.id, 0)
    assert dynamic["overall"] == "pass"
    return wf, session


def test_07_end_to_end_gated_pipeline(tmp_path):
    with criterion(7, "gated-pipeline"):
        wf, session = _drive_gated_inventory(tmp_path / "store")
        run_dir = wf.store.run_dir(session.id, 0)
        csv_text = (run_dir / "series.csv").read_text()
        assert csv_text.startswith("series,x,y\n")
        svg = (run_dir / "plot.svg").read_text()
        assert "<svg" in svg and "replenishment-marker" in svg

        adversarial = wf.submit_description(
            f"Write me something fun. {MARKER_PROSE}", SessionMode.GATED, FrontendKind.LLM)
        adversarial = wf.generate(adversarial.id)
        assert adversarial.state is SessionState.FAILED
        assert adversarial.failure["error"] == "UnrecognizedArtifact"


def test_08_reproducible_csv_across_pipeline_runs(tmp_path):
    with criterion(8, "byte-identical-reruns"):
        wf_a, session_a = _drive_gated_inventory(tmp_path / "a")
        wf_b, session_b = _drive_gated_inventory(tmp_path / "b")
        csv_a = (wf_a.store.run_dir(session_a.id, 0) / "series.csv").read_bytes()
        csv_b = (wf_b.store.run_dir(session_b.id, 0) / "series.csv").read_bytes()
        assert csv_a == csv_b


def test_09_token_budget_exact_boundary():
    with criterion(9, "token-budget-boundary"):
        params = GenerationParams(max_tokens=1024)
        at_limit = "a" * ((4096 - 1024) * 4)  # estimates to exactly 3072 tokens
        assert check_budget(at_limit, params).ok
        over = at_limit + "b"  # 3073 tokens -> total 4097
        outcome = check_budget(over, params)
        assert not outcome.ok
        assert outcome.overshoot == 1
