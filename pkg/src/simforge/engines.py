"""Reference simulation kernels for the two supported system kinds.

These are the ground truth the rest of the pipeline is judged against:
generated programs must reproduce these traces exactly, draw for draw.
The loops below therefore perform the same arithmetic, in the same order,
as the code the emitter produces — when changing one, change both.

Draw accounting (part of the trace contract):
  * constant distributions consume no RNG output;
  * every other distribution draw consumes exactly one SplitMix64 output;
  * inventory consumes one demand draw per day, in day order;
  * the queue draws an interarrival time at start and at each arrival event,
    and a service time whenever a customer enters service.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .ir import DistKind, DistributionSpec, InventoryParams, QueueParams, StopKind, validate_spec
from .rng import SplitMix64
from .simscript.interpreter import RunResult

IDLE = 1e300  # next-departure sentinel while the server is empty


@dataclass(frozen=True)
class InventoryDayRecord:
    day: int
    demand: int
    received: int
    fulfilled: int
    lost: int
    on_hand_end: int
    order_placed: bool


class QueueEventKind(str, Enum):
    ARRIVAL = "arrival"
    DEPARTURE = "departure"


@dataclass(frozen=True)
class QueueEvent:
    kind: QueueEventKind
    time: float
    customer_id: int  # 1-based, in arrival order


def sample_demand(dist: DistributionSpec, rng: SplitMix64) -> int:
    """Daily demand in units: draws are truncated to non-negative integers."""
    if dist.kind is DistKind.CONSTANT:
        value = int(math.floor(dist.params[0]))
    elif dist.kind is DistKind.UNIFORM_INT:
        value = rng.uniform_int(int(dist.params[0]), int(dist.params[1]))
    elif dist.kind is DistKind.UNIFORM_REAL:
        value = int(math.floor(rng.uniform(dist.params[0], dist.params[1])))
    else:
        value = int(math.floor(rng.exponential(dist.params[0])))
    return value if value > 0 else 0


def sample_time(dist: DistributionSpec, rng: SplitMix64) -> float:
    """Interarrival / service durations: non-negative reals."""
    if dist.kind is DistKind.CONSTANT:
        return dist.params[0]
    if dist.kind is DistKind.UNIFORM_INT:
        return float(rng.uniform_int(int(dist.params[0]), int(dist.params[1])))
    if dist.kind is DistKind.UNIFORM_REAL:
        return rng.uniform(dist.params[0], dist.params[1])
    return rng.exponential(dist.params[0])


# ---------------------------------------------------------------------------
# inventory


def run_inventory_detailed(params: InventoryParams, seed: int) -> tuple[RunResult, list[InventoryDayRecord]]:
    """(s, Q) inventory run plus the per-day bookkeeping records.

    Daily step order: draw demand, receive any order due today, fulfill what
    stock allows (remainder is lost), then the end-of-day reorder check on
    inventory position with at most one order outstanding. A zero lead time
    receives at the reorder step itself.
    """
    rng = SplitMix64(seed)
    inventory = params.initial_inventory
    outstanding = 0
    arrival_day = 0
    records: list[InventoryDayRecord] = []

    result = RunResult(seed=seed)
    on_hand = result.series.setdefault("on_hand", [])
    demand_series = result.series.setdefault("demand", [])
    fulfilled_series = result.series.setdefault("fulfilled", [])
    lost_series = result.series.setdefault("lost", [])
    on_hand.append((0, params.initial_inventory))

    for day in range(1, params.horizon + 1):
        demand = sample_demand(params.demand, rng)
        received = 0
        if outstanding > 0 and arrival_day == day:
            inventory += params.order_quantity
            received = params.order_quantity
            outstanding = 0
            arrival_day = 0
            result.events.append(("replenishment", day))

        fulfilled = demand if demand <= inventory else inventory
        inventory -= fulfilled
        lost = demand - fulfilled

        order_placed = False
        if outstanding == 0 and inventory <= params.reorder_point:
            order_placed = True
            if params.lead_time == 0:
                inventory += params.order_quantity
                received += params.order_quantity
                result.events.append(("replenishment", day))
            else:
                outstanding = params.order_quantity
                arrival_day = day + params.lead_time

        demand_series.append((day, demand))
        fulfilled_series.append((day, fulfilled))
        lost_series.append((day, lost))
        on_hand.append((day, inventory))
        records.append(InventoryDayRecord(
            day=day, demand=demand, received=received, fulfilled=fulfilled,
            lost=lost, on_hand_end=inventory, order_placed=order_placed))

    total_demand = sum(r.demand for r in records)
    total_fulfilled = sum(r.fulfilled for r in records)
    result.summary = {
        "final_on_hand": float(inventory),
        "total_demand": float(total_demand),
        "total_fulfilled": float(total_fulfilled),
        "total_lost": float(total_demand - total_fulfilled),
        "replenishments": float(len(result.events)),
        "mean_on_hand": (sum(r.on_hand_end for r in records) / len(records)) if records else 0.0,
        "fill_rate": (total_fulfilled / total_demand) if total_demand > 0 else 1.0,
    }
    return result, records


def run_inventory(params: InventoryParams, seed: int) -> RunResult:
    return run_inventory_detailed(params, seed)[0]


# ---------------------------------------------------------------------------
# queue


def run_queue_detailed(params: QueueParams, seed: int,
                       record_series: bool = True) -> tuple[RunResult, list[QueueEvent]]:
    """Event-driven single-server FIFO run plus the raw event log.

    Two clocks (next arrival, next departure) race; ties go to the departure
    so the server frees before the next customer is admitted. Waits and
    sojourns are recorded when the customer departs, so their counts always
    equal the departure count. ``record_series=False`` keeps only the summary
    accumulators (identical draws), for long statistical runs.
    """
    rng = SplitMix64(seed)
    stop_at_customers = params.stop.kind is StopKind.CUSTOMERS
    target = int(params.stop.value) if stop_at_customers else 0
    stop_time = params.stop.value

    clock = 0.0
    arrivals = 0
    departures = 0
    in_system = 0
    arrival_times: list[float] = []
    service_starts: list[float] = []
    next_arrival = sample_time(params.interarrival, rng)
    next_departure = IDLE

    result = RunResult(seed=seed)
    events: list[QueueEvent] = []
    if record_series:
        # series keys are created on first append, exactly like the
        # interpreter's record() builtin, so key sets and order agree even
        # for runs that end before any departure
        result.series.setdefault("system_size", []).append((0.0, 0))

    # summary accumulators (valid in both recording modes)
    area = 0.0
    busy = 0.0
    sum_wait = 0.0
    sum_sojourn = 0.0

    def advance_clock(to: float) -> None:
        nonlocal area, busy, clock
        dt = to - clock
        area += in_system * dt
        if in_system > 0:
            busy += dt
        clock = to

    while True:
        if stop_at_customers:
            if departures >= target:
                break
        else:
            next_event = next_departure if next_departure <= next_arrival else next_arrival
            if next_event > stop_time:
                break

        if next_departure <= next_arrival:
            advance_clock(next_departure)
            in_system -= 1
            departures += 1
            wait = service_starts[departures - 1] - arrival_times[departures - 1]
            sojourn = clock - arrival_times[departures - 1]
            sum_wait += wait
            sum_sojourn += sojourn
            events.append(QueueEvent(QueueEventKind.DEPARTURE, clock, departures))
            if record_series:
                result.series.setdefault("wait", []).append((departures, wait))
                result.series.setdefault("sojourn", []).append((departures, sojourn))
                result.series["system_size"].append((clock, in_system))
            if in_system > 0:
                service_starts.append(clock)
                next_departure = clock + sample_time(params.service, rng)
            else:
                next_departure = IDLE
        else:
            advance_clock(next_arrival)
            arrivals += 1
            arrival_times.append(clock)
            in_system += 1
            events.append(QueueEvent(QueueEventKind.ARRIVAL, clock, arrivals))
            if record_series:
                result.series["system_size"].append((clock, in_system))
            next_arrival = clock + sample_time(params.interarrival, rng)
            if in_system == 1:
                service_starts.append(clock)
                next_departure = clock + sample_time(params.service, rng)

    if stop_at_customers:
        elapsed = clock
    else:
        # close out the step integrals at the stop time
        advance_clock(stop_time)
        elapsed = stop_time

    result.summary = {
        "arrivals": float(arrivals),
        "departures": float(departures),
        "elapsed": elapsed,
        "mean_wait": (sum_wait / departures) if departures else 0.0,
        "mean_sojourn": (sum_sojourn / departures) if departures else 0.0,
        "time_avg_system_size": (area / elapsed) if elapsed > 0 else 0.0,
        "utilization": (busy / elapsed) if elapsed > 0 else 0.0,
        "effective_arrival_rate": (departures / elapsed) if elapsed > 0 else 0.0,
    }
    return result, events


def run_queue(params: QueueParams, seed: int, record_series: bool = True) -> RunResult:
    return run_queue_detailed(params, seed, record_series=record_series)[0]


# ---------------------------------------------------------------------------
# dispatch


def run_spec(spec, seed: int | None = None) -> RunResult:
    """Run a full SimulationSpec on the matching engine."""
    outcome = validate_spec(spec)
    if not outcome.ok:
        raise ValueError("cannot run invalid spec: " + "; ".join(map(str, outcome.violations)))
    effective_seed = spec.seed if seed is None else seed
    if spec.inventory is not None:
        return run_inventory(spec.inventory, effective_seed)
    return run_queue(spec.queue, effective_seed)
