"""Mock-backend fixtures: the demo descriptions, the completions a
cooperative model would return for them, and adversarial completions
(prose, truncated source, permuted draw order) that exercise the
rejection and oracle-comparison paths.
"""

from __future__ import annotations

from functools import lru_cache

from .codegen import emit
from .frontend import parse_controlled
from .ir import serialize_canonical

DEMO_INVENTORY_DESCRIPTION = (
    "Simulate an inventory system for 30 days. The initial inventory is 100 units. "
    "Daily demand is uniform between 5 and 15 units. "
    "When inventory falls to 30 units or below, order 60 units. "
    "Orders arrive after 2 days. Use seed 42."
)

DEMO_QUEUE_DESCRIPTION = (
    "Customers arrive on average every 2.0 minutes, exponentially distributed. "
    "Service takes on average 1.0 minutes, exponentially distributed. "
    "Simulate 500 customers. Use seed 7."
)

PROSE_COMPLETION = (
    "Sure! Here is how I would approach an inventory simulation in Python.\n"
    "First, import the random module, then loop over the days and subtract\n"
    "the demand from the stock. Good luck!\n"
)

TRUNCATED_COMPLETION = (
    "## simscript v1\n"
    "# === preamble ===\n"
    "# single-server FIFO queue\n"
    "# === declarations ===\n"
    "clock = 0.0\n"
    "departures = 0\n"
    "while departures <\n"
)

# markers the mock scans for, first hit wins (case-insensitive)
MARKER_PROSE = "SIMFORGE-FIXTURE: PROSE"
MARKER_TRUNCATED = "SIMFORGE-FIXTURE: TRUNCATED"
MARKER_REORDERED = "SIMFORGE-FIXTURE: REORDERED"
MARKER_INVENTORY_B = "INVENTORY-B"


@lru_cache(maxsize=None)
def demo_inventory_completion() -> str:
    """Canonical spec text for the inventory demo description."""
    return serialize_canonical(parse_controlled(DEMO_INVENTORY_DESCRIPTION))


@lru_cache(maxsize=None)
def demo_queue_completion() -> str:
    """SimScript source for the queue demo description."""
    return emit(parse_controlled(DEMO_QUEUE_DESCRIPTION))


# A queue program with the two draws at an idle-server arrival permuted:
# it starts service before scheduling the next arrival, so it consumes the
# random stream in a different order than the reference engine. Statistically
# identical, trace-exact different. Uniform times keep the summary statistics
# well inside the 5% distribution tolerance at this run length.
REORDERED_QUEUE_DESCRIPTION = (
    "Customers arrive uniformly between 1.5 and 2.5 minutes apart. "
    "Service takes uniformly between 0.5 and 1.5 minutes. "
    "Simulate 5000 customers. Use seed 11."
)


@lru_cache(maxsize=None)
def reordered_queue_completion() -> str:
    source = emit(parse_controlled(REORDERED_QUEUE_DESCRIPTION))
    lines = source.split("\n")
    arrival_line = next(i for i, ln in enumerate(lines)
                        if ln.strip().startswith("next_arrival = clock + "))
    # move the next-arrival draw below the start-of-service block (3 lines)
    moved = lines.pop(arrival_line)
    lines.insert(arrival_line + 3, moved)
    return "\n".join(lines)


def default_fixtures() -> list[tuple[str, str]]:
    """Marker table for the standard mock backend.

    Markers are matched against the whole prompt, so they are phrases that
    occur in descriptions but not in any prompt template text.
    """
    return [
        (MARKER_PROSE, PROSE_COMPLETION),
        (MARKER_TRUNCATED, TRUNCATED_COMPLETION),
        (MARKER_REORDERED, reordered_queue_completion()),
        (MARKER_INVENTORY_B, demo_inventory_completion()),
        ("inventory system for", demo_inventory_completion()),
        ("customers arrive", demo_queue_completion()),
    ]
