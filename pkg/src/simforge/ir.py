"""Simulation intermediate representation.

Every frontend (controlled English or language model) produces a
``SimulationSpec`` and every backend (reference engines, code emitter)
consumes one.  The canonical text form is line-oriented ``key: value`` with
dotted keys for nesting, documented bit-exactly in docs/canonical_format.md;
``parse_canonical`` is the exact inverse of ``serialize_canonical`` on its
image.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import Enum

SPEC_SENTINEL = "## simspec v1"

_IDENT_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


class SystemKind(str, Enum):
    INVENTORY = "inventory"
    QUEUE = "queue"


class DistKind(str, Enum):
    CONSTANT = "constant"
    UNIFORM_INT = "uniform_int"
    UNIFORM_REAL = "uniform_real"
    EXPONENTIAL = "exponential"


class StopKind(str, Enum):
    CUSTOMERS = "customers"
    TIME = "time"


@dataclass(frozen=True)
class DistributionSpec:
    """A sampling rule: constant(value), uniform(low, high) or exponential(mean)."""

    kind: DistKind
    params: tuple[float, ...]

    @staticmethod
    def constant(value: float) -> "DistributionSpec":
        return DistributionSpec(DistKind.CONSTANT, (float(value),))

    @staticmethod
    def uniform_int(low: int, high: int) -> "DistributionSpec":
        return DistributionSpec(DistKind.UNIFORM_INT, (float(low), float(high)))

    @staticmethod
    def uniform_real(low: float, high: float) -> "DistributionSpec":
        return DistributionSpec(DistKind.UNIFORM_REAL, (float(low), float(high)))

    @staticmethod
    def exponential(mean: float) -> "DistributionSpec":
        return DistributionSpec(DistKind.EXPONENTIAL, (float(mean),))


@dataclass(frozen=True)
class InventoryParams:
    """Single-product (s, Q) inventory control, integer units, daily steps."""

    initial_inventory: int
    reorder_point: int  # may be negative: position never reaches it, reordering off
    order_quantity: int
    lead_time: int
    demand: DistributionSpec
    horizon: int


@dataclass(frozen=True)
class StopRule:
    kind: StopKind
    value: float  # number of customers, or elapsed time


@dataclass(frozen=True)
class QueueParams:
    """Single-server FIFO queue, real-valued times."""

    interarrival: DistributionSpec
    service: DistributionSpec
    servers: int = 1
    discipline: str = "fifo"
    stop: StopRule = field(default_factory=lambda: StopRule(StopKind.CUSTOMERS, 1000.0))


@dataclass(frozen=True)
class OutputSpec:
    series: tuple[str, ...]
    xlabel: str
    ylabel: str
    grid: bool = True
    legend: bool = True
    replenishment_markers: bool = False


@dataclass(frozen=True)
class SimulationSpec:
    kind: SystemKind
    output: OutputSpec
    seed: int
    inventory: InventoryParams | None = None
    queue: QueueParams | None = None


@dataclass(frozen=True)
class Violation:
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.path}: {self.message}"


@dataclass(frozen=True)
class ValidationOutcome:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


class CanonicalParseError(Exception):
    """Base for canonical-text parse failures; carries the offending line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class MissingField(CanonicalParseError):
    def __init__(self, key: str, line: int):
        super().__init__(f"missing required field '{key}'", line)
        self.key = key


class UnknownKey(CanonicalParseError):
    """Unknown or duplicated key."""

    def __init__(self, key: str, line: int, reason: str = "unknown key"):
        super().__init__(f"{reason} '{key}'", line)
        self.key = key


class TypeMismatch(CanonicalParseError):
    def __init__(self, key: str, expected: str, got: str, line: int):
        super().__init__(f"field '{key}' expects {expected}, got {got!r}", line)
        self.key = key


# ---------------------------------------------------------------------------
# validation


def _check_distribution(dist: DistributionSpec, path: str, out: list[Violation],
                        require_nonneg_support: bool = False,
                        require_positive_support: bool = False) -> None:
    arity = {DistKind.CONSTANT: 1, DistKind.UNIFORM_INT: 2,
             DistKind.UNIFORM_REAL: 2, DistKind.EXPONENTIAL: 1}
    if not isinstance(dist.kind, DistKind):
        out.append(Violation(path + ".kind", f"unknown distribution kind {dist.kind!r}"))
        return
    for i, p in enumerate(dist.params):
        if not math.isfinite(p):
            out.append(Violation(f"{path}.params[{i}]", "parameter must be finite"))
            return
    if len(dist.params) != arity[dist.kind]:
        out.append(Violation(path + ".params",
                             f"{dist.kind.value} takes {arity[dist.kind]} parameter(s), "
                             f"got {len(dist.params)}"))
        return
    if dist.kind in (DistKind.UNIFORM_INT, DistKind.UNIFORM_REAL):
        low, high = dist.params
        if low > high:
            out.append(Violation(path + ".params", f"uniform requires low <= high, got {low} > {high}"))
        if dist.kind is DistKind.UNIFORM_INT and (low != int(low) or high != int(high)):
            out.append(Violation(path + ".params", "uniform_int bounds must be integers"))
        if require_nonneg_support and low < 0:
            out.append(Violation(path + ".params", "draws must be non-negative: low >= 0 required"))
        if require_positive_support and high <= 0:
            out.append(Violation(path + ".params", "draws must be able to exceed zero: high > 0 required"))
    elif dist.kind is DistKind.EXPONENTIAL:
        if dist.params[0] <= 0:
            out.append(Violation(path + ".params", "exponential mean > 0 required"))
    elif dist.kind is DistKind.CONSTANT:
        if require_positive_support and dist.params[0] <= 0:
            out.append(Violation(path + ".params", "value > 0 required"))
        elif require_nonneg_support and dist.params[0] < 0:
            out.append(Violation(path + ".params", "draws must be non-negative: value >= 0 required"))


def _check_int(value: object, path: str, out: list[Violation], minimum: int | None = None) -> None:
    if not isinstance(value, int) or isinstance(value, bool):
        out.append(Violation(path, f"must be an integer, got {value!r}"))
        return
    if minimum is not None and value < minimum:
        out.append(Violation(path, f"must be >= {minimum}, got {value}"))


def validate_spec(spec: SimulationSpec) -> ValidationOutcome:
    """Check every type invariant; violations are data, never exceptions."""
    out: list[Violation] = []

    populated = [name for name, val in (("inventory", spec.inventory), ("queue", spec.queue)) if val is not None]
    if len(populated) != 1 or populated[0] != spec.kind.value:
        out.append(Violation("kind", f"exactly one of inventory/queue must be populated and match "
                                     f"kind={spec.kind.value!r}; populated: {populated}"))
        return ValidationOutcome(tuple(out))

    if not isinstance(spec.seed, int) or isinstance(spec.seed, bool) or not 0 <= spec.seed < 2**64:
        out.append(Violation("seed", f"must be an unsigned 64-bit integer, got {spec.seed!r}"))

    inv = spec.inventory
    if inv is not None:
        _check_int(inv.initial_inventory, "inventory.initial_inventory", out, minimum=0)
        _check_int(inv.reorder_point, "inventory.reorder_point", out)
        _check_int(inv.order_quantity, "inventory.order_quantity", out, minimum=1)
        _check_int(inv.lead_time, "inventory.lead_time", out, minimum=0)
        _check_int(inv.horizon, "inventory.horizon", out, minimum=1)
        _check_distribution(inv.demand, "inventory.demand", out)

    q = spec.queue
    if q is not None:
        if q.servers != 1:
            out.append(Violation("queue.servers", f"only a single server is supported, got {q.servers}"))
        if q.discipline != "fifo":
            out.append(Violation("queue.discipline", f"only fifo is supported, got {q.discipline!r}"))
        # interarrival times must be able to exceed zero or the event clock never advances
        _check_distribution(q.interarrival, "queue.interarrival", out,
                            require_nonneg_support=True, require_positive_support=True)
        _check_distribution(q.service, "queue.service", out, require_nonneg_support=True)
        if not math.isfinite(q.stop.value) or q.stop.value <= 0:
            out.append(Violation("queue.stop.value", f"stop bound must be positive, got {q.stop.value}"))
        elif q.stop.kind is StopKind.CUSTOMERS and q.stop.value != int(q.stop.value):
            out.append(Violation("queue.stop.value", "customer count must be an integer"))

    o = spec.output
    if not o.series:
        out.append(Violation("output.series", "series must be non-empty"))
    seen: set[str] = set()
    for i, name in enumerate(o.series):
        if not _IDENT_RE.match(name):
            out.append(Violation(f"output.series[{i}]", f"not an identifier: {name!r}"))
        if name in seen:
            out.append(Violation(f"output.series[{i}]", f"duplicate series {name!r}"))
        seen.add(name)
    for label_name, label in (("output.xlabel", o.xlabel), ("output.ylabel", o.ylabel)):
        if "\n" in label or label != label.strip():
            out.append(Violation(label_name, "label must be a single stripped line"))
        if "'" in label or '"' in label:
            out.append(Violation(label_name, "label must not contain quote characters"))

    return ValidationOutcome(tuple(out))


# ---------------------------------------------------------------------------
# canonical text form


def format_number(value: float | int) -> str:
    """Integral values print without a decimal point; repr() otherwise (round-trips)."""
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, int):
        return str(value)
    if math.isfinite(value) and value == int(value) and abs(value) < 2**63:
        return str(int(value))
    return repr(value)


def _dist_lines(prefix: str, dist: DistributionSpec) -> list[str]:
    params = ", ".join(format_number(p) for p in dist.params)
    return [f"{prefix}.kind: {dist.kind.value}", f"{prefix}.params: {params}"]


def serialize_canonical(spec: SimulationSpec) -> str:
    """Deterministic canonical form: LF line endings, fixed key order, UTF-8."""
    outcome = validate_spec(spec)
    if not outcome.ok:
        raise ValueError("cannot serialize invalid spec: " + "; ".join(map(str, outcome.violations)))
    lines = [SPEC_SENTINEL, f"kind: {spec.kind.value}", f"seed: {spec.seed}"]
    if spec.inventory is not None:
        inv = spec.inventory
        lines += [
            f"inventory.initial_inventory: {inv.initial_inventory}",
            f"inventory.reorder_point: {inv.reorder_point}",
            f"inventory.order_quantity: {inv.order_quantity}",
            f"inventory.lead_time: {inv.lead_time}",
            *_dist_lines("inventory.demand", inv.demand),
            f"inventory.horizon: {inv.horizon}",
        ]
    if spec.queue is not None:
        q = spec.queue
        lines += [
            *_dist_lines("queue.interarrival", q.interarrival),
            *_dist_lines("queue.service", q.service),
            f"queue.servers: {q.servers}",
            f"queue.discipline: {q.discipline}",
            f"queue.stop.kind: {q.stop.kind.value}",
            f"queue.stop.value: {format_number(q.stop.value)}",
        ]
    o = spec.output
    lines += [
        f"output.series: {', '.join(o.series)}",
        f"output.xlabel: {o.xlabel}",
        f"output.ylabel: {o.ylabel}",
        f"output.grid: {'true' if o.grid else 'false'}",
        f"output.legend: {'true' if o.legend else 'false'}",
        f"output.replenishment_markers: {'true' if o.replenishment_markers else 'false'}",
    ]
    return "\n".join(lines) + "\n"


_INVENTORY_KEYS = (
    "inventory.initial_inventory", "inventory.reorder_point", "inventory.order_quantity",
    "inventory.lead_time", "inventory.demand.kind", "inventory.demand.params", "inventory.horizon",
)
_QUEUE_KEYS = (
    "queue.interarrival.kind", "queue.interarrival.params", "queue.service.kind",
    "queue.service.params", "queue.servers", "queue.discipline", "queue.stop.kind", "queue.stop.value",
)
_OUTPUT_KEYS = (
    "output.series", "output.xlabel", "output.ylabel", "output.grid",
    "output.legend", "output.replenishment_markers",
)
_ALL_KEYS = frozenset(("kind", "seed") + _INVENTORY_KEYS + _QUEUE_KEYS + _OUTPUT_KEYS)


class _Fields:
    """Key/value lines with line numbers, consumed during parsing."""

    def __init__(self, entries: dict[str, tuple[str, int]], last_line: int):
        self.entries = entries
        self.last_line = last_line

    def take(self, key: str) -> tuple[str, int]:
        if key not in self.entries:
            raise MissingField(key, self.last_line)
        return self.entries.pop(key)

    def take_int(self, key: str, unsigned: bool = False) -> int:
        raw, line = self.take(key)
        try:
            value = int(raw)
        except ValueError:
            raise TypeMismatch(key, "an integer", raw, line) from None
        if unsigned and value < 0:
            raise TypeMismatch(key, "a non-negative integer", raw, line)
        return value

    def take_number(self, key: str) -> float:
        raw, line = self.take(key)
        try:
            return float(raw)
        except ValueError:
            raise TypeMismatch(key, "a number", raw, line) from None

    def take_bool(self, key: str) -> bool:
        raw, line = self.take(key)
        if raw not in ("true", "false"):
            raise TypeMismatch(key, "true or false", raw, line)
        return raw == "true"

    def take_enum(self, key: str, enum_cls: type[Enum]) -> Enum:
        raw, line = self.take(key)
        try:
            return enum_cls(raw)
        except ValueError:
            allowed = "/".join(m.value for m in enum_cls)
            raise TypeMismatch(key, allowed, raw, line) from None

    def take_dist(self, prefix: str) -> DistributionSpec:
        kind = self.take_enum(prefix + ".kind", DistKind)
        raw, line = self.take(prefix + ".params")
        params = []
        for piece in raw.split(","):
            piece = piece.strip()
            try:
                params.append(float(piece))
            except ValueError:
                raise TypeMismatch(prefix + ".params", "comma-separated numbers", raw, line) from None
        return DistributionSpec(kind, tuple(params))  # type: ignore[arg-type]


def parse_canonical(text: str) -> SimulationSpec:
    """Inverse of serialize_canonical; errors report 1-based line numbers."""
    lines = text.split("\n")
    first_content = next((i for i, ln in enumerate(lines) if ln.strip()), None)
    if first_content is None or lines[first_content].strip() != SPEC_SENTINEL:
        raise MissingField(SPEC_SENTINEL, (first_content or 0) + 1)

    entries: dict[str, tuple[str, int]] = {}
    for i, line in enumerate(lines[first_content + 1:], start=first_content + 2):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if ":" not in stripped:
            raise TypeMismatch("<line>", "'key: value'", stripped, i)
        key, _, value = stripped.partition(":")
        key = key.strip()
        if key not in _ALL_KEYS:
            raise UnknownKey(key, i)
        if key in entries:
            raise UnknownKey(key, i, reason="duplicate key")
        entries[key] = (value.strip(), i)

    fields = _Fields(entries, len(lines))
    kind = fields.take_enum("kind", SystemKind)
    seed = fields.take_int("seed", unsigned=True)

    inventory = None
    queue = None
    if kind is SystemKind.INVENTORY:
        inventory = InventoryParams(
            initial_inventory=fields.take_int("inventory.initial_inventory"),
            reorder_point=fields.take_int("inventory.reorder_point"),
            order_quantity=fields.take_int("inventory.order_quantity"),
            lead_time=fields.take_int("inventory.lead_time"),
            demand=fields.take_dist("inventory.demand"),
            horizon=fields.take_int("inventory.horizon"),
        )
    else:
        stop_kind = fields.take_enum("queue.stop.kind", StopKind)
        queue = QueueParams(
            interarrival=fields.take_dist("queue.interarrival"),
            service=fields.take_dist("queue.service"),
            servers=fields.take_int("queue.servers"),
            discipline=fields.take("queue.discipline")[0],
            stop=StopRule(stop_kind, fields.take_number("queue.stop.value")),  # type: ignore[arg-type]
        )

    raw_series, series_line = fields.take("output.series")
    series = tuple(s.strip() for s in raw_series.split(",") if s.strip())
    if not series:
        raise TypeMismatch("output.series", "comma-separated identifiers", raw_series, series_line)
    output = OutputSpec(
        series=series,
        xlabel=fields.take("output.xlabel")[0],
        ylabel=fields.take("output.ylabel")[0],
        grid=fields.take_bool("output.grid"),
        legend=fields.take_bool("output.legend"),
        replenishment_markers=fields.take_bool("output.replenishment_markers"),
    )

    for leftover, (_, line) in fields.entries.items():
        raise UnknownKey(leftover, line, reason=f"key not valid for kind={kind.value}")

    return SimulationSpec(kind=kind, output=output, seed=seed, inventory=inventory, queue=queue)
