import random

from simforge.engines import (
    QueueEventKind,
    run_inventory,
    run_inventory_detailed,
    run_queue,
    run_queue_detailed,
    run_spec,
)
from simforge.ir import DistributionSpec, InventoryParams, QueueParams, StopKind, StopRule

from .genspecs import random_inventory_spec, random_queue_spec


def inv(init=100, s=30, q=50, lead=2, demand=10, horizon=10):
    return InventoryParams(init, s, q, lead, DistributionSpec.constant(demand), horizon)


class TestInventoryOracles:
    def test_zero_demand_flat(self):
        result = run_inventory(inv(demand=0, horizon=5), seed=1)
        assert [y for _, y in result.series["on_hand"]] == [100] * 6
        assert result.events == []

    def test_hand_trace_order_timing(self):
        # hand-executed before implementation: demand 10/day from 100,
        # position hits 30 at end of day 7, order arrives morning of day 9,
        # so day 9 closes at 60 and day 10 at 50
        result, records = run_inventory_detailed(inv(), seed=0)
        placed = [r.day for r in records if r.order_placed]
        received = [r.day for r in records if r.received > 0]
        assert placed == [7]
        assert received == [9]
        assert result.events == [("replenishment", 9)]
        assert [y for _, y in result.series["on_hand"]] == [
            100, 90, 80, 70, 60, 50, 40, 30, 20, 60, 50]
        assert result.summary["final_on_hand"] == 50

    def test_partial_fulfillment_lost_sales(self):
        # 5 on hand, constant demand 10, reordering off via the s=-1 sentinel
        result, records = run_inventory_detailed(
            InventoryParams(5, -1, 1, 0, DistributionSpec.constant(10), 3), seed=0)
        day1 = records[0]
        assert (day1.fulfilled, day1.lost, day1.on_hand_end) == (5, 5, 0)
        assert all(r.on_hand_end == 0 for r in records[1:])
        assert all(r.lost == 10 for r in records[1:])

    def test_zero_lead_time_receives_same_day(self):
        result, records = run_inventory_detailed(inv(lead=0), seed=0)
        first_order = next(r for r in records if r.order_placed)
        assert first_order.received == 50
        assert ("replenishment", first_order.day) in result.events

    def test_at_most_one_outstanding_order(self):
        # reorder point far above stock: an order is wanted every day, but a
        # new one may only go out after the outstanding one arrives
        _, records = run_inventory_detailed(inv(s=200, q=10, lead=5, horizon=30), seed=3)
        outstanding = False
        for r in records:
            if r.received:
                outstanding = False
            if r.order_placed:
                assert not outstanding
                outstanding = True


class TestInventoryInvariants:
    def test_conservation_fuzz(self):
        rng = random.Random(42)
        for _ in range(200):
            spec = random_inventory_spec(rng, max_horizon=60)
            lead = spec.inventory.lead_time
            _, records = run_inventory_detailed(spec.inventory, spec.seed)
            prev = spec.inventory.initial_inventory
            fulfilled_total = 0
            received_total = 0
            for r in records:
                if lead == 0:
                    assert r.fulfilled == min(r.demand, prev)
                    assert r.on_hand_end == prev - r.fulfilled + r.received
                else:
                    assert r.fulfilled == min(r.demand, prev + r.received)
                    assert r.on_hand_end == prev + r.received - r.fulfilled
                assert r.on_hand_end >= 0
                assert r.lost == r.demand - r.fulfilled
                assert r.lost >= 0
                received_total += r.received
                fulfilled_total += r.fulfilled
                prev = r.on_hand_end
            assert prev == spec.inventory.initial_inventory + received_total - fulfilled_total

    def test_orders_received_exactly_lead_time_later(self):
        rng = random.Random(43)
        for _ in range(100):
            spec = random_inventory_spec(rng, max_horizon=60)
            lead = spec.inventory.lead_time
            _, records = run_inventory_detailed(spec.inventory, spec.seed)
            placements = [r.day for r in records if r.order_placed]
            receipts = [r.day for r in records if r.received > 0]
            expected = [d + lead for d in placements if d + lead <= spec.inventory.horizon]
            assert receipts == expected
            for r in records:
                if r.received:
                    assert r.received == spec.inventory.order_quantity

    def test_determinism(self):
        spec = random_inventory_spec(random.Random(7))
        a = run_inventory(spec.inventory, spec.seed)
        b = run_inventory(spec.inventory, spec.seed)
        assert a.series == b.series and a.events == b.events and a.summary == b.summary


def queue(ia, sv, stop):
    return QueueParams(ia, sv, stop=stop)


class TestQueueOracles:
    def test_single_customer(self):
        params = queue(DistributionSpec.exponential(2.0), DistributionSpec.exponential(1.0),
                       StopRule(StopKind.CUSTOMERS, 1))
        result = run_queue(params, seed=5)
        assert result.series["wait"] == [(1, 0.0)]
        [(_, sojourn)] = result.series["sojourn"]
        assert sojourn > 0
        assert result.summary["departures"] == 1

    def test_constant_no_queueing(self):
        # interarrival 2, service 1: server always idle on arrival
        params = queue(DistributionSpec.constant(2.0), DistributionSpec.constant(1.0),
                       StopRule(StopKind.CUSTOMERS, 100))
        result = run_queue(params, seed=0)
        assert all(w == 0 for _, w in result.series["wait"])
        assert abs(result.summary["utilization"] - 0.5) < 0.02

    def test_constant_overloaded_waits_grow_linearly(self):
        # interarrival 1, service 2: customer k waits k-1
        params = queue(DistributionSpec.constant(1.0), DistributionSpec.constant(2.0),
                       StopRule(StopKind.CUSTOMERS, 5))
        result = run_queue(params, seed=0)
        assert [w for _, w in result.series["wait"]] == [0.0, 1.0, 2.0, 3.0, 4.0]

    def test_time_stop(self):
        params = queue(DistributionSpec.constant(2.0), DistributionSpec.constant(1.0),
                       StopRule(StopKind.TIME, 10.0))
        result = run_queue(params, seed=0)
        assert result.summary["elapsed"] == 10.0
        assert result.summary["departures"] == 4  # arrivals at 2,4,6,8; departures 3,5,7,9

    def test_departure_before_arrival_on_tie(self):
        # arrivals every 1.0, service exactly 1.0: departure and arrival collide
        params = queue(DistributionSpec.constant(1.0), DistributionSpec.constant(1.0),
                       StopRule(StopKind.CUSTOMERS, 10))
        _, events = run_queue_detailed(params, seed=0)
        by_time: dict[float, list[str]] = {}
        for ev in events:
            by_time.setdefault(ev.time, []).append(ev.kind.value)
        for kinds in by_time.values():
            if len(kinds) == 2:
                assert kinds == ["departure", "arrival"]


class TestQueueInvariants:
    def test_fifo_and_counts_fuzz(self):
        rng = random.Random(11)
        for _ in range(100):
            spec = random_queue_spec(rng, max_customers=80, max_time=80.0)
            result, events = run_queue_detailed(spec.queue, spec.seed)
            arrivals = [e for e in events if e.kind is QueueEventKind.ARRIVAL]
            departures = [e for e in events if e.kind is QueueEventKind.DEPARTURE]
            assert len(departures) <= len(arrivals)
            assert [e.customer_id for e in departures] == list(range(1, len(departures) + 1))
            times = [e.time for e in events]
            assert times == sorted(times)
            assert len(result.series.get("wait", [])) == len(departures)
            assert len(result.series.get("sojourn", [])) == len(departures)
            sizes = [y for _, y in result.series["system_size"]]
            assert min(sizes) >= 0

    def test_littles_law_medium_runs(self):
        rng = random.Random(9)
        for _ in range(5):
            lam = rng.uniform(0.3, 0.7)
            params = queue(DistributionSpec.exponential(1.0 / lam), DistributionSpec.exponential(1.0),
                           StopRule(StopKind.CUSTOMERS, 20_000))
            result = run_queue(params, rng.getrandbits(64), record_series=False)
            s = result.summary
            gap = abs(s["time_avg_system_size"] - s["effective_arrival_rate"] * s["mean_sojourn"])
            assert gap / s["time_avg_system_size"] <= 0.05

    def test_summary_accumulators_match_series(self):
        from simforge.validation import compute_summary

        rng = random.Random(23)
        for _ in range(30):
            spec = random_queue_spec(rng, max_customers=60, max_time=60.0)
            result = run_queue(spec.queue, spec.seed)
            derived = compute_summary(result, spec)
            for key, value in result.summary.items():
                assert abs(derived[key] - value) <= 1e-9 * max(1.0, abs(value)), key

    def test_determinism(self):
        spec = random_queue_spec(random.Random(31))
        a = run_queue(spec.queue, spec.seed)
        b = run_queue(spec.queue, spec.seed)
        assert a.series == b.series and a.summary == b.summary

    def test_run_spec_dispatch(self):
        rng = random.Random(77)
        inv_spec = random_inventory_spec(rng)
        q_spec = random_queue_spec(rng)
        assert "on_hand" in run_spec(inv_spec).series
        assert "system_size" in run_spec(q_spec).series
