import math
import random

import pytest

from simforge.codegen import emit
from simforge.engines import run_queue, run_spec
from simforge.fixtures import REORDERED_QUEUE_DESCRIPTION, reordered_queue_completion
from simforge.frontend import parse_controlled
from simforge.ir import (
    DistributionSpec,
    InventoryParams,
    OutputSpec,
    QueueParams,
    SimulationSpec,
    StopKind,
    StopRule,
    SystemKind,
)
from simforge.simscript import RunResult, interpret, parse_source
from simforge.validation import (
    CheckStatus,
    MM1Stats,
    Unstable,
    ValidationReport,
    analytical_mm1,
    check_dynamic,
    check_static,
    compare_to_oracle,
    compute_summary,
)

from .genspecs import random_inventory_spec, random_queue_spec, random_spec


class TestAnalyticalMM1:
    def test_closed_form_half_load(self):
        stats = analytical_mm1(0.5, 1.0)
        assert stats == MM1Stats(rho=0.5, L=1.0, W=2.0)

    def test_unstable_at_equal_rates(self):
        with pytest.raises(Unstable):
            analytical_mm1(1.0, 1.0)

    def test_light_traffic_limit(self):
        stats = analytical_mm1(1e-9, 1.0)
        assert stats.L == pytest.approx(0.0, abs=1e-8)
        assert stats.W == pytest.approx(1.0, rel=1e-6)

    def test_agrees_with_simulation_across_loads(self):
        # the rho=0.9 point needs a very long run and lives in the slow suite
        for rho, customers, tol in ((0.3, 200_000, 0.05), (0.5, 200_000, 0.05), (0.7, 300_000, 0.05)):
            stats = analytical_mm1(rho, 1.0)
            params = QueueParams(
                interarrival=DistributionSpec.exponential(1.0 / rho),
                service=DistributionSpec.exponential(1.0),
                stop=StopRule(StopKind.CUSTOMERS, customers))
            summary = run_queue(params, seed=2025, record_series=False).summary
            assert abs(summary["time_avg_system_size"] - stats.L) / stats.L <= tol
            assert abs(summary["mean_sojourn"] - stats.W) / stats.W <= tol

    @pytest.mark.slow
    def test_heavy_traffic_agreement(self):
        stats = analytical_mm1(0.9, 1.0)
        params = QueueParams(
            interarrival=DistributionSpec.exponential(1.0 / 0.9),
            service=DistributionSpec.exponential(1.0),
            stop=StopRule(StopKind.CUSTOMERS, 1_000_000))
        summary = run_queue(params, seed=99, record_series=False).summary
        assert abs(summary["time_avg_system_size"] - stats.L) / stats.L <= 0.10
        assert abs(summary["mean_sojourn"] - stats.W) / stats.W <= 0.10


class TestCheckStatic:
    def test_valid_spec_passes(self):
        report = check_static(random_spec(random.Random(1)))
        assert report.overall

    def test_invalid_spec_fails_with_path(self):
        spec = SimulationSpec(
            kind=SystemKind.INVENTORY,
            output=OutputSpec(("on_hand",), "t", "y"),
            seed=0,
            inventory=InventoryParams(10, 5, 5, 1, DistributionSpec.constant(1), 0))
        report = check_static(spec)
        assert not report.overall
        assert "horizon" in report.check("spec.invariants").detail

    def test_emitted_program_all_pass(self):
        spec = random_spec(random.Random(2))
        source = emit(spec)
        report = check_static(parse_source(source), source=source)
        assert report.overall
        assert {c.check_id for c in report.checks} == {
            "static.use_before_assign", "static.termination_lint",
            "static.builtin_audit", "static.sections"}

    def test_undefined_variable_fails(self):
        report = check_static(parse_source("y = x + 1"))
        assert report.check("static.use_before_assign").status is CheckStatus.FAIL

    def test_while_true_fails_lint(self):
        report = check_static(parse_source("while True: pass"))
        assert report.check("static.termination_lint").status is CheckStatus.FAIL

    def test_sections_skip_without_source(self):
        report = check_static(parse_source("x = 1"))
        assert report.check("static.sections").status is CheckStatus.SKIP


class TestCheckDynamic:
    def test_engine_runs_pass_fuzz(self):
        rng = random.Random(55)
        for _ in range(500):
            spec = random_spec(rng)
            report = check_dynamic(run_spec(spec), spec)
            assert report.overall, [c for c in report.checks if c.status is CheckStatus.FAIL]

    def test_fabricated_jump_fails_conservation(self):
        spec = parse_controlled(
            "Simulate an inventory system for 3 days. The initial inventory is 10 units. "
            "Daily demand is constant at 2 units. Replenishment is disabled.")
        result = run_spec(spec)
        # inject an unexplained jump on day 2
        result.series["on_hand"][2] = (2, 50)
        report = check_dynamic(result, spec)
        assert report.check("inv.conservation").status is CheckStatus.FAIL

    def test_missing_marker_fails_timing(self):
        spec = parse_controlled(
            "Simulate an inventory system for 10 days. The initial inventory is 20 units. "
            "Daily demand is constant at 5 units. When inventory falls to 10 units or below, "
            "order 15 units. Orders arrive after 1 days.")
        result = run_spec(spec)
        assert result.events
        dropped = RunResult(series=result.series, events=[], summary=result.summary,
                            seed=result.seed)
        report = check_dynamic(dropped, spec)
        assert not report.overall

    def test_negative_on_hand_fails(self):
        spec = parse_controlled(
            "Simulate an inventory system for 2 days. The initial inventory is 4 units. "
            "Daily demand is constant at 2 units. Replenishment is disabled.")
        result = run_spec(spec)
        result.series["on_hand"][1] = (1, -2)
        report = check_dynamic(result, spec)
        assert report.check("inv.non_negative").status is CheckStatus.FAIL

    def test_queue_engine_passes(self):
        spec = random_queue_spec(random.Random(66))
        report = check_dynamic(run_spec(spec), spec)
        assert report.overall

    def test_littles_law_skipped_on_short_runs(self):
        spec = random_queue_spec(random.Random(67), max_customers=50)
        report = check_dynamic(run_spec(spec), spec)
        assert report.check("q.littles_law").status is CheckStatus.SKIP

    def test_littles_law_checked_on_long_runs(self):
        spec = parse_controlled(
            "Customers arrive on average every 2.0 minutes, exponentially distributed. "
            "Service takes on average 1.0 minutes, exponentially distributed. "
            "Simulate 12000 customers. Use seed 4.")
        report = check_dynamic(run_spec(spec), spec)
        assert report.check("q.littles_law").status is CheckStatus.PASS

    def test_broken_fifo_wait_fails(self):
        spec = parse_controlled(
            "Customers arrive every 1.0 minutes. Service takes 2.0 minutes. "
            "Simulate 5 customers.")
        result = run_spec(spec)
        waits = result.series["wait"]
        waits[3] = (waits[3][0], waits[3][1] + 0.5)
        report = check_dynamic(result, spec)
        assert report.check("q.fifo_discipline").status is CheckStatus.FAIL

    def test_malformed_trace_reports_not_crashes(self):
        spec = random_inventory_spec(random.Random(68))
        report = check_dynamic(RunResult(series={"on_hand": [("x", None)]}), spec)
        assert not report.overall


class TestCompareToOracle:
    def test_emitted_program_exact_pass(self):
        rng = random.Random(12)
        for _ in range(10):
            spec = random_spec(rng)
            result = interpret(parse_source(emit(spec)), spec.seed)
            report = compare_to_oracle(result, spec, spec.seed)
            assert report.check("oracle.trace_exact").status is CheckStatus.PASS
            assert report.check("oracle.distribution").status is CheckStatus.PASS

    def test_reordered_draws_exact_fail_distribution_pass(self):
        spec = parse_controlled(REORDERED_QUEUE_DESCRIPTION)
        program = parse_source(reordered_queue_completion())
        result = interpret(program, spec.seed)
        report = compare_to_oracle(result, spec, spec.seed)
        assert report.check("oracle.trace_exact").status is CheckStatus.FAIL
        assert report.check("oracle.distribution").status is CheckStatus.PASS

    def test_empty_result_fails_with_point_counts(self):
        spec = random_inventory_spec(random.Random(13))
        report = compare_to_oracle(RunResult(), spec, spec.seed)
        exact = report.check("oracle.trace_exact")
        assert exact.status is CheckStatus.FAIL
        assert "series names differ" in exact.detail or "points" in exact.detail


class TestComputeSummary:
    def test_matches_engine_summaries(self):
        rng = random.Random(90)
        for _ in range(40):
            spec = random_spec(rng)
            result = run_spec(spec)
            derived = compute_summary(result, spec)
            for key, value in result.summary.items():
                assert math.isclose(derived[key], value, rel_tol=1e-12, abs_tol=1e-12), key

    def test_reports_serialize(self):
        spec = random_spec(random.Random(91))
        report = check_dynamic(run_spec(spec), spec)
        assert ValidationReport.from_dict(report.to_dict()) == report
