"""Deterministic controlled-English frontend.

Descriptions are split into sentences; every sentence must either match one
of the documented grammar patterns (docs/controlled_grammar.md) or be a
variable-bindings sentence of ``name=value`` pairs. Unknown sentences are
errors, never silently dropped. ``render_description`` is the inverse: it
emits one canonical sentence per field and reparses to an equal spec.
"""

from __future__ import annotations

import difflib
import re
from dataclasses import dataclass
from typing import Callable

from .ir import (
    DistKind,
    DistributionSpec,
    InventoryParams,
    OutputSpec,
    QueueParams,
    SimulationSpec,
    StopKind,
    StopRule,
    SystemKind,
    format_number,
    validate_spec,
)

GRAMMAR_VERSION = "1.0"

INVENTORY_KEYWORDS = frozenset({
    "inventory", "demand", "replenish", "replenishment", "replenished",
    "reorder", "stock", "warehouse",
})
QUEUE_KEYWORDS = frozenset({
    "customer", "customers", "server", "servers", "service", "serve",
    "served", "queue", "queueing", "queuing",
})

_INT = r"(-?\d+)"
_NUM = r"(-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)"

_WORD_RE = re.compile(r"[a-z_]+")
_BINDING_RE = re.compile(
    r"([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(?:'([^']*)'|\"([^\"]*)\"|(-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?))"
)
_GLUE_RE = re.compile(r"^(?:use|with|given|set|the|variables?|and|,|\s)*$", re.IGNORECASE)


class FrontendError(Exception):
    grammar_version = GRAMMAR_VERSION


class UnrecognizedSentence(FrontendError):
    def __init__(self, sentence: str, nearest_pattern: str, nearest_template: str):
        super().__init__(
            f"unrecognized sentence {sentence!r}; closest pattern is "
            f"{nearest_pattern} ({nearest_template!r})")
        self.sentence = sentence
        self.nearest_pattern = nearest_pattern
        self.nearest_template = nearest_template


class MissingParameter(FrontendError):
    def __init__(self, field: str):
        super().__init__(f"description never specifies '{field}'")
        self.field = field


class ConflictingParameter(FrontendError):
    def __init__(self, field: str, old: object, new: object):
        super().__init__(f"'{field}' specified twice with different values: {old!r} then {new!r}")
        self.field = field


class DuplicateBinding(FrontendError):
    def __init__(self, name: str):
        super().__init__(f"variable '{name}' bound more than once")
        self.name = name


class UnknownBinding(FrontendError):
    def __init__(self, name: str):
        super().__init__(f"variable '{name}' is not in the documented binding table")
        self.name = name


class InvalidParameter(FrontendError):
    def __init__(self, field: str, message: str):
        super().__init__(f"'{field}': {message}")
        self.field = field


@dataclass(frozen=True)
class VariableBinding:
    name: str
    value: str | float


@dataclass(frozen=True)
class ControlledSentence:
    pattern_id: str
    captures: dict


@dataclass(frozen=True)
class _Pattern:
    pattern_id: str
    template: str  # human-readable form used in docs and error suggestions
    regex: re.Pattern
    fields: Callable[[tuple[str, ...]], dict]


def _p(pattern_id: str, template: str, regex: str, fields: Callable[[tuple[str, ...]], dict]) -> _Pattern:
    return _Pattern(pattern_id, template, re.compile("^" + regex + "$"), fields)


def _dist(kind: DistKind, *params: str) -> DistributionSpec:
    return DistributionSpec(kind, tuple(float(p) for p in params))


PATTERNS: tuple[_Pattern, ...] = (
    _p("inv_context", "simulate an inventory system for <days> days",
       rf"simulate an inventory system for {_INT} days?",
       lambda g: {"horizon": int(g[0])}),
    _p("inv_initial", "the initial inventory is <units> units",
       rf"the initial inventory is {_INT} units?",
       lambda g: {"initial_inventory": int(g[0])}),
    _p("inv_demand_constant", "daily demand is constant at <units> units",
       rf"daily demand is constant at {_NUM} units?",
       lambda g: {"demand": _dist(DistKind.CONSTANT, g[0])}),
    _p("inv_demand_uniform_int", "daily demand is uniform between <low> and <high> units",
       rf"daily demand is uniform between {_INT} and {_INT} units?",
       lambda g: {"demand": _dist(DistKind.UNIFORM_INT, g[0], g[1])}),
    _p("inv_demand_uniform_real", "daily demand is real uniform between <low> and <high> units",
       rf"daily demand is real uniform between {_NUM} and {_NUM} units?",
       lambda g: {"demand": _dist(DistKind.UNIFORM_REAL, g[0], g[1])}),
    _p("inv_demand_exponential", "daily demand is exponential with mean <units> units",
       rf"daily demand is exponential with mean {_NUM} units?",
       lambda g: {"demand": _dist(DistKind.EXPONENTIAL, g[0])}),
    _p("inv_reorder", "when inventory falls to <units> units or below, order <units> units",
       rf"when inventory falls to {_INT} units? or below,? order {_INT} units?",
       lambda g: {"reorder_point": int(g[0]), "order_quantity": int(g[1])}),
    _p("inv_lead_time", "orders arrive after <days> days",
       rf"orders arrive after {_INT} days?",
       lambda g: {"lead_time": int(g[0])}),
    _p("inv_no_reorder", "replenishment is disabled",
       r"replenishment is disabled",
       lambda g: {"reorder_point": -1, "order_quantity": 1, "lead_time": 0}),
    _p("q_arrival_exponential", "customers arrive on average every <t> minutes, exponentially distributed",
       rf"customers arrive on average every {_NUM} minutes?,? exponentially distributed",
       lambda g: {"interarrival": _dist(DistKind.EXPONENTIAL, g[0])}),
    _p("q_arrival_uniform", "customers arrive uniformly between <low> and <high> minutes apart",
       rf"customers arrive uniformly between {_NUM} and {_NUM} minutes? apart",
       lambda g: {"interarrival": _dist(DistKind.UNIFORM_REAL, g[0], g[1])}),
    _p("q_arrival_uniform_int", "customers arrive integer uniformly between <low> and <high> minutes apart",
       rf"customers arrive integer uniformly between {_INT} and {_INT} minutes? apart",
       lambda g: {"interarrival": _dist(DistKind.UNIFORM_INT, g[0], g[1])}),
    _p("q_arrival_constant", "customers arrive every <t> minutes",
       rf"customers arrive every {_NUM} minutes?",
       lambda g: {"interarrival": _dist(DistKind.CONSTANT, g[0])}),
    _p("q_service_exponential", "service takes on average <t> minutes, exponentially distributed",
       rf"service takes on average {_NUM} minutes?,? exponentially distributed",
       lambda g: {"service": _dist(DistKind.EXPONENTIAL, g[0])}),
    _p("q_service_uniform", "service takes uniformly between <low> and <high> minutes",
       rf"service takes uniformly between {_NUM} and {_NUM} minutes?",
       lambda g: {"service": _dist(DistKind.UNIFORM_REAL, g[0], g[1])}),
    _p("q_service_uniform_int", "service takes integer uniformly between <low> and <high> minutes",
       rf"service takes integer uniformly between {_INT} and {_INT} minutes?",
       lambda g: {"service": _dist(DistKind.UNIFORM_INT, g[0], g[1])}),
    _p("q_service_constant", "service takes <t> minutes",
       rf"service takes {_NUM} minutes?",
       lambda g: {"service": _dist(DistKind.CONSTANT, g[0])}),
    _p("q_stop_customers", "simulate <n> customers",
       rf"simulate {_INT} customers?",
       lambda g: {"stop": StopRule(StopKind.CUSTOMERS, float(int(g[0])))}),
    _p("q_stop_time", "simulate for <t> minutes",
       rf"simulate for {_NUM} minutes?",
       lambda g: {"stop": StopRule(StopKind.TIME, float(g[0]))}),
    _p("use_seed", "use seed <n>",
       rf"use seed {_INT}",
       lambda g: {"seed": int(g[0])}),
)

_INVENTORY_FIELDS = frozenset({
    "initial_inventory", "reorder_point", "order_quantity", "lead_time", "demand", "horizon",
})
_QUEUE_FIELDS = frozenset({"interarrival", "service", "stop"})

# binding name -> field assignments (documented table, docs/controlled_grammar.md)
_BINDING_FIELDS: dict[str, Callable[[str | float], dict]] = {
    "initial_inventory": lambda v: {"initial_inventory": _as_int("initial_inventory", v)},
    "reorder_point": lambda v: {"reorder_point": _as_int("reorder_point", v)},
    "order_quantity": lambda v: {"order_quantity": _as_int("order_quantity", v)},
    "lead_time": lambda v: {"lead_time": _as_int("lead_time", v)},
    "horizon": lambda v: {"horizon": _as_int("horizon", v)},
    "demand": lambda v: {"demand": DistributionSpec.constant(_as_number("demand", v))},
    "interarrival_mean": lambda v: {"interarrival": DistributionSpec.exponential(_as_number("interarrival_mean", v))},
    "service_mean": lambda v: {"service": DistributionSpec.exponential(_as_number("service_mean", v))},
    "customers": lambda v: {"stop": StopRule(StopKind.CUSTOMERS, float(_as_int("customers", v)))},
    "sim_time": lambda v: {"stop": StopRule(StopKind.TIME, _as_number("sim_time", v))},
    "seed": lambda v: {"seed": _as_int("seed", v)},
    "xlabel": lambda v: {"xlabel": _as_text("xlabel", v)},
    "ylabel": lambda v: {"ylabel": _as_text("ylabel", v)},
    "series": lambda v: {"series": tuple(s.strip() for s in _as_text("series", v).split(",") if s.strip())},
    "grid": lambda v: {"grid": _as_number("grid", v) != 0},
    "legend": lambda v: {"legend": _as_number("legend", v) != 0},
    "replenishment_markers": lambda v: {"replenishment_markers": _as_number("replenishment_markers", v) != 0},
}


def _as_int(name: str, value: str | float) -> int:
    if isinstance(value, float) and value == int(value):
        return int(value)
    raise InvalidParameter(name, f"expects an integer, got {value!r}")


def _as_number(name: str, value: str | float) -> float:
    if isinstance(value, float):
        return value
    raise InvalidParameter(name, f"expects a number, got {value!r}")


def _as_text(name: str, value: str | float) -> str:
    if isinstance(value, str):
        return value
    raise InvalidParameter(name, f"expects quoted text, got {value!r}")


def split_sentences(description: str) -> list[str]:
    """Split on '.' followed by whitespace or end of text (decimals survive)."""
    parts = re.split(r"\.(?:\s+|$)", description)
    return [p.strip() for p in parts if p.strip()]


def normalize_sentence(sentence: str) -> str:
    return re.sub(r"\s+", " ", sentence.strip().rstrip(".")).lower()


def classify_domain(description: str) -> str:
    """Keyword-table domain guess: 'inventory', 'queue' or 'unknown'."""
    words = set(_WORD_RE.findall(description.lower()))
    inv = bool(words & INVENTORY_KEYWORDS)
    q = bool(words & QUEUE_KEYWORDS)
    if inv == q:
        return "unknown"
    return "inventory" if inv else "queue"


def extract_bindings(description: str) -> list[VariableBinding]:
    """All name=value / name='text' fragments, in order of appearance."""
    bindings: list[VariableBinding] = []
    seen: set[str] = set()
    for match in _BINDING_RE.finditer(description):
        name = match.group(1)
        if name in seen:
            raise DuplicateBinding(name)
        seen.add(name)
        if match.group(4) is not None:
            value: str | float = float(match.group(4))
        else:
            value = match.group(2) if match.group(2) is not None else match.group(3)
        bindings.append(VariableBinding(name, value))
    return bindings


def _is_bindings_sentence(sentence: str) -> bool:
    if "=" not in sentence:
        return False
    leftover = _BINDING_RE.sub("", sentence)
    return bool(_GLUE_RE.match(leftover))


def _match_sentence(sentence: str) -> ControlledSentence:
    normalized = normalize_sentence(sentence)
    for pattern in PATTERNS:
        m = pattern.regex.match(normalized)
        if m:
            return ControlledSentence(pattern.pattern_id, pattern.fields(m.groups()))
    candidates = {p.template: p for p in PATTERNS}
    nearest = difflib.get_close_matches(normalized, list(candidates), n=1, cutoff=0.0)
    best = candidates[nearest[0]]
    raise UnrecognizedSentence(sentence, best.pattern_id, best.template)


def _merge(fields: dict, new: dict) -> None:
    for key, value in new.items():
        if key in fields and fields[key] != value:
            raise ConflictingParameter(key, fields[key], value)
        fields[key] = value


def parse_controlled(description: str) -> SimulationSpec:
    """Parse a controlled-English description into a validated SimulationSpec."""
    fields: dict = {}
    bound = extract_bindings(description)  # also rejects duplicates anywhere

    for sentence in split_sentences(description):
        if _is_bindings_sentence(sentence):
            continue  # merged below via extract_bindings over the whole text
        matched = _match_sentence(sentence)
        _merge(fields, matched.captures)

    for binding in bound:
        if binding.name not in _BINDING_FIELDS:
            raise UnknownBinding(binding.name)
        _merge(fields, _BINDING_FIELDS[binding.name](binding.value))

    inv_evidence = bool(fields.keys() & _INVENTORY_FIELDS)
    q_evidence = bool(fields.keys() & _QUEUE_FIELDS)
    if inv_evidence and q_evidence:
        raise ConflictingParameter("kind", "inventory", "queue")
    if not inv_evidence and not q_evidence:
        raise MissingParameter("kind")
    kind = SystemKind.INVENTORY if inv_evidence else SystemKind.QUEUE

    seed = fields.get("seed", 0)
    if kind is SystemKind.INVENTORY:
        for required in ("initial_inventory", "demand", "horizon"):
            if required not in fields:
                raise MissingParameter(f"inventory.{required}")
        reorder_keys = {"reorder_point", "order_quantity", "lead_time"}
        present = fields.keys() & reorder_keys
        if present and present != reorder_keys:
            raise MissingParameter("inventory." + sorted(reorder_keys - present)[0])
        if not present:
            fields.update(reorder_point=-1, order_quantity=1, lead_time=0)
        inventory = InventoryParams(
            initial_inventory=fields["initial_inventory"],
            reorder_point=fields["reorder_point"],
            order_quantity=fields["order_quantity"],
            lead_time=fields["lead_time"],
            demand=fields["demand"],
            horizon=fields["horizon"],
        )
        output = OutputSpec(
            series=fields.get("series", ("on_hand",)),
            xlabel=fields.get("xlabel", "time"),
            ylabel=fields.get("ylabel", "inventory"),
            grid=fields.get("grid", True),
            legend=fields.get("legend", True),
            replenishment_markers=fields.get("replenishment_markers", True),
        )
        spec = SimulationSpec(kind=kind, output=output, seed=seed, inventory=inventory)
    else:
        for required in ("interarrival", "service", "stop"):
            if required not in fields:
                raise MissingParameter(f"queue.{required}")
        queue = QueueParams(
            interarrival=fields["interarrival"],
            service=fields["service"],
            stop=fields["stop"],
        )
        output = OutputSpec(
            series=fields.get("series", ("system_size",)),
            xlabel=fields.get("xlabel", "time"),
            ylabel=fields.get("ylabel", "customers in system"),
            grid=fields.get("grid", True),
            legend=fields.get("legend", True),
            replenishment_markers=fields.get("replenishment_markers", False),
        )
        spec = SimulationSpec(kind=kind, output=output, seed=seed, queue=queue)

    outcome = validate_spec(spec)
    if not outcome.ok:
        first = outcome.violations[0]
        raise InvalidParameter(first.path, first.message)
    return spec


# ---------------------------------------------------------------------------
# renderer (inverse of parse_controlled on valid specs)


def _render_demand(dist: DistributionSpec) -> str:
    if dist.kind is DistKind.CONSTANT:
        return f"Daily demand is constant at {format_number(dist.params[0])} units"
    if dist.kind is DistKind.UNIFORM_INT:
        a, b = dist.params
        return f"Daily demand is uniform between {format_number(a)} and {format_number(b)} units"
    if dist.kind is DistKind.UNIFORM_REAL:
        a, b = dist.params
        return f"Daily demand is real uniform between {format_number(a)} and {format_number(b)} units"
    return f"Daily demand is exponential with mean {format_number(dist.params[0])} units"


def _render_interarrival(dist: DistributionSpec) -> str:
    if dist.kind is DistKind.CONSTANT:
        return f"Customers arrive every {format_number(dist.params[0])} minutes"
    if dist.kind is DistKind.UNIFORM_INT:
        a, b = dist.params
        return f"Customers arrive integer uniformly between {format_number(a)} and {format_number(b)} minutes apart"
    if dist.kind is DistKind.UNIFORM_REAL:
        a, b = dist.params
        return f"Customers arrive uniformly between {format_number(a)} and {format_number(b)} minutes apart"
    return f"Customers arrive on average every {format_number(dist.params[0])} minutes, exponentially distributed"


def _render_service(dist: DistributionSpec) -> str:
    if dist.kind is DistKind.CONSTANT:
        return f"Service takes {format_number(dist.params[0])} minutes"
    if dist.kind is DistKind.UNIFORM_INT:
        a, b = dist.params
        return f"Service takes integer uniformly between {format_number(a)} and {format_number(b)} minutes"
    if dist.kind is DistKind.UNIFORM_REAL:
        a, b = dist.params
        return f"Service takes uniformly between {format_number(a)} and {format_number(b)} minutes"
    return f"Service takes on average {format_number(dist.params[0])} minutes, exponentially distributed"


def render_description(spec: SimulationSpec) -> str:
    """One canonical sentence per field; reparses to an equal spec."""
    outcome = validate_spec(spec)
    if not outcome.ok:
        raise ValueError("cannot render invalid spec: " + "; ".join(map(str, outcome.violations)))

    sentences: list[str] = []
    if spec.inventory is not None:
        inv = spec.inventory
        sentences.append(f"Simulate an inventory system for {inv.horizon} days")
        sentences.append(f"The initial inventory is {inv.initial_inventory} units")
        sentences.append(_render_demand(inv.demand))
        if (inv.reorder_point, inv.order_quantity, inv.lead_time) == (-1, 1, 0):
            sentences.append("Replenishment is disabled")
        else:
            sentences.append(
                f"When inventory falls to {inv.reorder_point} units or below, "
                f"order {inv.order_quantity} units")
            sentences.append(f"Orders arrive after {inv.lead_time} days")
    else:
        q = spec.queue
        sentences.append(_render_interarrival(q.interarrival))
        sentences.append(_render_service(q.service))
        if q.stop.kind is StopKind.CUSTOMERS:
            sentences.append(f"Simulate {int(q.stop.value)} customers")
        else:
            sentences.append(f"Simulate for {format_number(q.stop.value)} minutes")

    sentences.append(f"Use seed {spec.seed}")
    o = spec.output
    flags = (f"grid={1 if o.grid else 0}, legend={1 if o.legend else 0}, "
             f"replenishment_markers={1 if o.replenishment_markers else 0}")
    sentences.append(
        f"Use series='{','.join(o.series)}', xlabel='{o.xlabel}', ylabel='{o.ylabel}', {flags}")
    return ". ".join(sentences) + "."
