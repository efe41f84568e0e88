"""The complete SimScript builtin surface.

record/mark_event/plot_decl are the only output channels the language has;
the rest are pure samplers and math. There is deliberately no builtin that
touches files, network, or the host runtime, and the interpreter dispatches
only through this table.
"""

from __future__ import annotations

# name -> (arity, is_output_channel)
BUILTINS: dict[str, tuple[int, bool]] = {
    "rand_uniform": (2, False),
    "rand_uniform_int": (2, False),
    "rand_exp": (1, False),
    "floor": (1, False),
    "record": (3, True),
    "mark_event": (2, True),
    "plot_decl": (4, True),
}

OUTPUT_BUILTINS = frozenset(name for name, (_, is_output) in BUILTINS.items() if is_output)
RANDOM_BUILTINS = frozenset({"rand_uniform", "rand_uniform_int", "rand_exp"})
