"""Prompt construction: context + instructions + pattern, three approaches.

Templates live as UTF-8 files (one per approach) with ``[context]``,
``[instructions]`` and ``[pattern]`` section markers; they are re-read on
every build so edits take effect immediately, and each build reports the
template id and content hash for the session log. The token budget is the
4,096-token window shared by prompt and completion; counting uses a
documented bytes/4 approximation (the live backend reports authoritative
counts, which are logged separately).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path

from .frontend import VariableBinding

TOKEN_WINDOW = 4096
DEFAULT_STOP_SEQUENCE = "## end"


class Approach(str, Enum):
    A_DETAILED = "a_detailed"
    B_MINIMAL_WITH_BINDINGS = "b_minimal_with_bindings"
    C_DETAILED_WITH_EXAMPLE = "c_detailed_with_example"


_TEMPLATE_FILES = {
    Approach.A_DETAILED: "approach_a.txt",
    Approach.B_MINIMAL_WITH_BINDINGS: "approach_b.txt",
    Approach.C_DETAILED_WITH_EXAMPLE: "approach_c.txt",
}


class EmptyDescription(Exception):
    def __init__(self) -> None:
        super().__init__("description must be non-empty")


class TemplateError(Exception):
    pass


@dataclass(frozen=True)
class PromptTemplate:
    approach: Approach
    context: str
    instructions: str
    pattern: str
    template_id: str
    sha256: str

    def __post_init__(self) -> None:
        if not self.context.strip():
            raise TemplateError(f"template {self.template_id}: context must be non-empty")
        if self.approach is Approach.C_DETAILED_WITH_EXAMPLE and "## example" not in self.pattern:
            raise TemplateError(f"template {self.template_id}: approach C requires a worked example block")


@dataclass(frozen=True)
class GenerationParams:
    temperature: float = 0.0
    max_tokens: int = 1024
    stop_sequences: tuple[str, ...] = (DEFAULT_STOP_SEQUENCE,)
    engine_id: str = "code-davinci-002"

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if not 0 < self.max_tokens <= TOKEN_WINDOW:
            raise ValueError(f"max_tokens must be in (0, {TOKEN_WINDOW}]")


@dataclass(frozen=True)
class BudgetOutcome:
    ok: bool
    overshoot: int = 0  # tokens beyond the window when not ok


def _template_text(approach: Approach, templates_dir: Path | None) -> tuple[str, str]:
    filename = _TEMPLATE_FILES[approach]
    if templates_dir is not None:
        return (templates_dir / filename).read_text(encoding="utf-8"), filename
    text = resources.files("simforge").joinpath("templates", filename).read_text(encoding="utf-8")
    return text, filename


def load_template(approach: Approach, templates_dir: Path | None = None) -> PromptTemplate:
    """Read and section a template file; re-read on every call (hot reload)."""
    text, template_id = _template_text(approach, templates_dir)
    sections: dict[str, list[str]] = {}
    current: list[str] | None = None
    for line in text.split("\n"):
        header = line.strip()
        if header in ("[context]", "[instructions]", "[pattern]"):
            current = sections.setdefault(header[1:-1], [])
            continue
        if current is not None:
            current.append(line)
    missing = {"context", "instructions", "pattern"} - sections.keys()
    if missing:
        raise TemplateError(f"template {template_id} is missing sections: {sorted(missing)}")
    return PromptTemplate(
        approach=approach,
        context="\n".join(sections["context"]).strip("\n"),
        instructions="\n".join(sections["instructions"]).strip("\n"),
        pattern="\n".join(sections["pattern"]).strip("\n"),
        template_id=template_id,
        sha256=hashlib.sha256(text.encode("utf-8")).hexdigest(),
    )


def render_binding(binding: VariableBinding) -> str:
    if isinstance(binding.value, str):
        return f"{binding.name}='{binding.value}'"
    value = binding.value
    if value == int(value) and abs(value) < 2**53:
        return f"{binding.name}={int(value)}"
    return f"{binding.name}={value!r}"


def build_prompt(approach: Approach, description: str,
                 bindings: list[VariableBinding] | None = None,
                 templates_dir: Path | None = None) -> str:
    """Concatenate context, instructions, description, bindings and pattern.

    The output always starts with the template context byte-for-byte, and the
    instructions direct the model at the two artifact sentinels, so anything
    it returns is machine-checkable downstream.
    """
    if not description.strip():
        raise EmptyDescription()
    template = load_template(approach, templates_dir)
    bindings_block = "\n".join(render_binding(b) for b in (bindings or []))
    return (
        f"{template.context}\n\n"
        f"{template.instructions}\n\n"
        f"## description\n{description}\n\n"
        f"## variables\n{bindings_block}\n\n"
        f"{template.pattern}\n"
    )


def estimate_tokens(text: str) -> int:
    """ceil(utf-8 bytes / 4) - a documented approximation, not a tokenizer."""
    return math.ceil(len(text.encode("utf-8")) / 4)


def check_budget(prompt: str, params: GenerationParams) -> BudgetOutcome:
    total = estimate_tokens(prompt) + params.max_tokens
    if total <= TOKEN_WINDOW:
        return BudgetOutcome(ok=True)
    return BudgetOutcome(ok=False, overshoot=total - TOKEN_WINDOW)
