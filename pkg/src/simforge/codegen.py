"""SimulationSpec -> SimScript source, and completion-text -> artifact parsing.

The emitted program follows a fixed four-section layout (preamble comment,
declarations, simulation loop, output declarations) and consumes random draws
in exactly the order the reference engines do, so interpreting the emitted
source reproduces the engine trace point for point. Completions are detected
by their first non-blank line: the ``## simspec v1`` / ``## simscript v1``
sentinels.
"""

from __future__ import annotations

import math

from .ir import (
    SPEC_SENTINEL,
    DistKind,
    DistributionSpec,
    SimulationSpec,
    StopKind,
    parse_canonical,
    validate_spec,
)
from .simscript import Program, parse_source

SCRIPT_SENTINEL = "## simscript v1"

SECTION_HEADERS = (
    "# === preamble ===",
    "# === declarations ===",
    "# === simulation loop ===",
    "# === output ===",
)


class UnsupportedKind(Exception):
    def __init__(self, kind: str):
        super().__init__(f"no emitter for system kind {kind!r}")
        self.kind = kind


class UnrecognizedArtifact(Exception):
    """Completion text is neither canonical spec text nor SimScript source."""

    def __init__(self, first_line: str, detail: str = ""):
        message = f"completion is not a recognized artifact; first line: {first_line!r}"
        if detail:
            message += f" ({detail})"
        super().__init__(message)
        self.first_line = first_line


def _lit(value: float) -> str:
    """Literal that parses back to exactly the same float."""
    if value == int(value) and abs(value) < 2**53:
        return str(int(value))
    return repr(value)


def _flag(value: bool) -> str:
    return "True" if value else "False"


def _demand_expr(dist: DistributionSpec) -> tuple[str, bool]:
    """Returns (expression, needs_clamp_to_zero)."""
    if dist.kind is DistKind.CONSTANT:
        return str(max(0, int(math.floor(dist.params[0])))), False
    if dist.kind is DistKind.UNIFORM_INT:
        a, b = dist.params
        return f"rand_uniform_int({_lit(a)}, {_lit(b)})", a < 0
    if dist.kind is DistKind.UNIFORM_REAL:
        a, b = dist.params
        return f"floor(rand_uniform({_lit(a)}, {_lit(b)}))", a < 0
    return f"floor(rand_exp({_lit(dist.params[0])}))", False


def _time_expr(dist: DistributionSpec) -> str:
    if dist.kind is DistKind.CONSTANT:
        return _lit(dist.params[0])
    if dist.kind is DistKind.UNIFORM_INT:
        a, b = dist.params
        return f"rand_uniform_int({_lit(a)}, {_lit(b)})"
    if dist.kind is DistKind.UNIFORM_REAL:
        a, b = dist.params
        return f"rand_uniform({_lit(a)}, {_lit(b)})"
    return f"rand_exp({_lit(dist.params[0])})"


def _emit_inventory(spec: SimulationSpec) -> str:
    inv = spec.inventory
    assert inv is not None
    out = spec.output
    demand_expr, clamp = _demand_expr(inv.demand)

    lines = [
        SCRIPT_SENTINEL,
        SECTION_HEADERS[0],
        "# single-product inventory control: daily demand, reorder point policy",
        f"# one order of {inv.order_quantity} units at a time, lead time {inv.lead_time} day(s)",
        SECTION_HEADERS[1],
        f"inventory = {inv.initial_inventory}",
        f"reorder_point = {inv.reorder_point}",
        f"order_quantity = {inv.order_quantity}",
        f"lead_time = {inv.lead_time}",
        f"horizon = {inv.horizon}",
        "outstanding = 0",
        "arrival_day = 0",
        SECTION_HEADERS[2],
        "record('on_hand', 0, inventory)",
        "for day in range(1, horizon + 1):",
        f"    demand = {demand_expr}",
    ]
    if clamp:
        lines += [
            "    if demand < 0:",
            "        demand = 0",
        ]
    lines += [
        "    if outstanding > 0:",
        "        if arrival_day == day:",
        "            inventory = inventory + order_quantity",
        "            outstanding = 0",
        "            arrival_day = 0",
        "            mark_event('replenishment', day)",
        "    if demand <= inventory:",
        "        fulfilled = demand",
        "    else:",
        "        fulfilled = inventory",
        "    inventory = inventory - fulfilled",
        "    lost = demand - fulfilled",
        "    if outstanding == 0:",
        "        if inventory <= reorder_point:",
    ]
    if inv.lead_time == 0:
        lines += [
            "            inventory = inventory + order_quantity",
            "            mark_event('replenishment', day)",
        ]
    else:
        lines += [
            "            outstanding = order_quantity",
            "            arrival_day = day + lead_time",
        ]
    lines += [
        "    record('demand', day, demand)",
        "    record('fulfilled', day, fulfilled)",
        "    record('lost', day, lost)",
        "    record('on_hand', day, inventory)",
        SECTION_HEADERS[3],
        f"plot_decl('{out.xlabel}', '{out.ylabel}', {_flag(out.grid)}, {_flag(out.legend)})",
    ]
    return "\n".join(lines) + "\n"


def _emit_queue(spec: SimulationSpec) -> str:
    q = spec.queue
    assert q is not None
    out = spec.output
    ia = _time_expr(q.interarrival)
    sv = _time_expr(q.service)
    by_customers = q.stop.kind is StopKind.CUSTOMERS

    lines = [
        SCRIPT_SENTINEL,
        SECTION_HEADERS[0],
        "# single-server FIFO queue: arrival and departure events race on the clock",
        "# ties are served departure-first so the server frees before the next admit",
        SECTION_HEADERS[1],
    ]
    if by_customers:
        lines.append(f"max_customers = {int(q.stop.value)}")
    else:
        lines.append(f"stop_time = {_lit(q.stop.value)}")
    lines += [
        "clock = 0.0",
        "arrivals = 0",
        "departures = 0",
        "in_system = 0",
        "arrival_times = []",
        "service_starts = []",
        f"next_arrival = {ia}",
        "next_departure = 1e300",
        SECTION_HEADERS[2],
        "record('system_size', 0, 0)",
    ]
    if by_customers:
        lines.append("while departures < max_customers:")
    else:
        lines += [
            "if next_departure <= next_arrival:",
            "    next_event = next_departure",
            "else:",
            "    next_event = next_arrival",
            "while next_event <= stop_time:",
        ]
    lines += [
        "    if next_departure <= next_arrival:",
        "        clock = next_departure",
        "        in_system = in_system - 1",
        "        departures = departures + 1",
        "        wait = service_starts[departures - 1] - arrival_times[departures - 1]",
        "        sojourn = clock - arrival_times[departures - 1]",
        "        record('wait', departures, wait)",
        "        record('sojourn', departures, sojourn)",
        "        record('system_size', clock, in_system)",
        "        if in_system > 0:",
        "            service_starts.append(clock)",
        f"            next_departure = clock + {sv}",
        "        else:",
        "            next_departure = 1e300",
        "    else:",
        "        clock = next_arrival",
        "        arrivals = arrivals + 1",
        "        arrival_times.append(clock)",
        "        in_system = in_system + 1",
        "        record('system_size', clock, in_system)",
        f"        next_arrival = clock + {ia}",
        "        if in_system == 1:",
        "            service_starts.append(clock)",
        f"            next_departure = clock + {sv}",
    ]
    if not by_customers:
        lines += [
            "    if next_departure <= next_arrival:",
            "        next_event = next_departure",
            "    else:",
            "        next_event = next_arrival",
        ]
    lines += [
        SECTION_HEADERS[3],
        f"plot_decl('{out.xlabel}', '{out.ylabel}', {_flag(out.grid)}, {_flag(out.legend)})",
    ]
    return "\n".join(lines) + "\n"


def emit(spec: SimulationSpec) -> str:
    """Compile a valid spec to SimScript source (deterministic)."""
    outcome = validate_spec(spec)
    if not outcome.ok:
        raise ValueError("cannot emit from invalid spec: " + "; ".join(map(str, outcome.violations)))
    if spec.inventory is not None:
        return _emit_inventory(spec)
    if spec.queue is not None:
        return _emit_queue(spec)
    raise UnsupportedKind(spec.kind.value)


def parse_llm_output(completion: str) -> Program | SimulationSpec:
    """Classify and parse a completion by its sentinel first line.

    Leading blank lines are tolerated. Text with a recognized sentinel that
    then fails to parse propagates the underlying parse error; anything else
    is rejected with the offending first line.
    """
    lines = completion.split("\n")
    first = next((ln.strip() for ln in lines if ln.strip()), "")
    if first == SPEC_SENTINEL:
        return parse_canonical(completion)
    if first == SCRIPT_SENTINEL:
        return parse_source(completion)
    raise UnrecognizedArtifact(first)
