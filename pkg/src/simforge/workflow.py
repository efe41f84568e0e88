"""Pipeline orchestration: sessions, approvals, execution, verification.

A session is an append-only event log (one JSON-lines file per session);
the in-memory Session object is always a fold over that log, so replaying
the log reconstructs the exact state. Gated sessions execute only after an
explicit approval; single-runtime sessions execute straight from Generated
and the expert verifies afterwards. Both modes share one state machine:

    Described -> (PromptBuilt) -> Generated -> Approved -> Executed -> Verified
                                      |    \\-> Rejected -> (regenerate)
                                      v
                                   Failed
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from . import artifacts, codegen, engines, llm, promptkit, validation
from .frontend import GRAMMAR_VERSION, FrontendError, extract_bindings, parse_controlled
from .ir import CanonicalParseError, OutputSpec, SimulationSpec, parse_canonical, serialize_canonical
from .simscript import ExecError, ExecLimits, LexError, ParseError, RunResult, parse_source, static_check


class SessionMode(str, Enum):
    SINGLE_RUNTIME = "single_runtime"
    GATED = "gated"


class FrontendKind(str, Enum):
    DETERMINISTIC = "deterministic"
    LLM = "llm"


class SessionState(str, Enum):
    DESCRIBED = "Described"
    PROMPT_BUILT = "PromptBuilt"
    GENERATED = "Generated"
    APPROVED = "Approved"
    REJECTED = "Rejected"
    EXECUTED = "Executed"
    VERIFIED = "Verified"
    FAILED = "Failed"


class WorkflowError(Exception):
    pass


class WrongState(WorkflowError):
    def __init__(self, operation: str, state: SessionState, allowed: tuple[SessionState, ...]):
        super().__init__(
            f"{operation} not allowed in state {state.value}; "
            f"requires {'/'.join(s.value for s in allowed)}")
        self.state = state


class MissingReason(WorkflowError):
    def __init__(self) -> None:
        super().__init__("rejecting requires a reason")


class EmptyDescription(WorkflowError):
    def __init__(self) -> None:
        super().__init__("description must be non-empty")


class UnknownSession(WorkflowError):
    def __init__(self, session_id: str):
        super().__init__(f"no session {session_id!r}")


@dataclass
class Session:
    """Fold of a session's event log."""

    id: str
    mode: SessionMode
    frontend: FrontendKind
    state: SessionState
    description: str
    grammar_version: str
    created_at: str
    prompt: str | None = None
    prompt_meta: dict | None = None
    completion: str | None = None
    backend_used: str | None = None
    attempts: int = 0
    artifact_kind: str | None = None  # "spec" | "program"
    artifact_text: str | None = None
    seed: int = 0
    static_report: dict | None = None
    approvals: list[dict] = field(default_factory=list)
    runs: list[dict] = field(default_factory=list)
    reports: list[dict] = field(default_factory=list)
    failure: dict | None = None
    events: list[dict] = field(default_factory=list)

    def to_public_dict(self) -> dict:
        return {
            "id": self.id,
            "mode": self.mode.value,
            "frontend": self.frontend.value,
            "state": self.state.value,
            "description": self.description,
            "grammar_version": self.grammar_version,
            "created_at": self.created_at,
            "prompt": self.prompt,
            "prompt_meta": self.prompt_meta,
            "completion": self.completion,
            "backend_used": self.backend_used,
            "attempts": self.attempts,
            "artifact_kind": self.artifact_kind,
            "artifact_text": self.artifact_text,
            "seed": self.seed,
            "static_report": self.static_report,
            "approvals": self.approvals,
            "runs": self.runs,
            "reports": self.reports,
            "failure": self.failure,
        }


def _fold(events: list[dict]) -> Session:
    created = events[0]
    assert created["event"] == "created"
    session = Session(
        id=created["session_id"],
        mode=SessionMode(created["mode"]),
        frontend=FrontendKind(created["frontend"]),
        state=SessionState.DESCRIBED,
        description=created["description"],
        grammar_version=created["grammar_version"],
        created_at=created["ts"],
        events=events,
    )
    for ev in events[1:]:
        kind = ev["event"]
        if kind == "description_edited":
            session.description = ev["description"]
        elif kind == "prompt_built":
            session.prompt = ev["prompt"]
            session.prompt_meta = {k: ev[k] for k in ("approach", "template_id", "template_sha256", "params")}
            session.state = SessionState.PROMPT_BUILT
        elif kind == "generated":
            session.artifact_kind = ev["artifact_kind"]
            session.artifact_text = ev["artifact_text"]
            session.seed = ev["seed"]
            session.static_report = ev["static_report"]
            session.completion = ev.get("completion")
            session.backend_used = ev.get("backend")
            session.attempts = ev.get("attempts", 0)
            session.state = SessionState.GENERATED
        elif kind == "approved":
            session.approvals.append({"actor": ev["actor"], "decision": "approve",
                                      "reason": ev.get("reason", ""), "ts": ev["ts"]})
            session.state = SessionState.APPROVED
        elif kind == "rejected":
            session.approvals.append({"actor": ev["actor"], "decision": "reject",
                                      "reason": ev["reason"], "ts": ev["ts"]})
            session.state = SessionState.REJECTED
        elif kind == "executed":
            session.runs.append({"index": ev["run_index"], "seed": ev["seed"],
                                 "steps_used": ev.get("steps_used", 0),
                                 "partial": ev.get("partial", False)})
            session.state = SessionState.EXECUTED
        elif kind == "verified":
            session.reports.extend(ev["reports"])
            session.approvals.append({"actor": ev["actor"], "decision": "signoff",
                                      "reason": ev.get("note", ""), "ts": ev["ts"]})
            session.state = SessionState.VERIFIED
        elif kind == "failed":
            session.failure = {"stage": ev["stage"], "error": ev["error"], "message": ev["message"]}
            if ev.get("partial_run_index") is not None:
                session.runs.append({"index": ev["partial_run_index"], "seed": ev.get("seed", 0),
                                     "steps_used": ev.get("steps_used", 0), "partial": True})
            session.state = SessionState.FAILED
        else:
            raise ValueError(f"unknown event type {kind!r} in session log")
    return session


class SessionStore:
    """One directory per session: events.jsonl plus derived run/report artifacts."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def lock(self, session_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(session_id, threading.Lock())

    def _events_path(self, session_id: str) -> Path:
        return self.root / session_id / "events.jsonl"

    def session_dir(self, session_id: str) -> Path:
        return self.root / session_id

    def create(self, description: str, mode: SessionMode, frontend: FrontendKind) -> Session:
        session_id = uuid.uuid4().hex[:12]
        directory = self.root / session_id
        directory.mkdir(parents=True)
        self.append(session_id, "created", {
            "session_id": session_id,
            "description": description,
            "mode": mode.value,
            "frontend": frontend.value,
            "grammar_version": GRAMMAR_VERSION,
        })
        return self.load(session_id)

    def append(self, session_id: str, event: str, payload: dict) -> None:
        path = self._events_path(session_id)
        if event != "created" and not path.exists():
            raise UnknownSession(session_id)
        record = {"event": event, "ts": _now(), **payload}
        record["seq"] = sum(1 for _ in path.open()) if path.exists() else 0
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, sort_keys=True) + "\n")

    def load(self, session_id: str) -> Session:
        path = self._events_path(session_id)
        if not path.exists():
            raise UnknownSession(session_id)
        events = [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines() if line]
        return _fold(events)

    def list_sessions(self) -> list[Session]:
        sessions = []
        for entry in sorted(self.root.iterdir()):
            if (entry / "events.jsonl").exists():
                sessions.append(self.load(entry.name))
        return sorted(sessions, key=lambda s: (s.created_at, s.id))

    # run / report artifacts

    def run_dir(self, session_id: str, index: int) -> Path:
        return self.root / session_id / "runs" / str(index)

    def write_run(self, session_id: str, index: int, result: RunResult,
                  output: OutputSpec, step_series: frozenset[str]) -> None:
        directory = self.run_dir(session_id, index)
        directory.mkdir(parents=True, exist_ok=True)
        (directory / "result.json").write_text(artifacts.result_to_json(result), encoding="utf-8")
        (directory / "series.csv").write_text(artifacts.series_csv(result), encoding="utf-8", newline="")
        (directory / "plot.svg").write_text(
            artifacts.plot_svg(result, output, step_series), encoding="utf-8")

    def read_run(self, session_id: str, index: int) -> RunResult:
        path = self.run_dir(session_id, index) / "result.json"
        if not path.exists():
            raise UnknownSession(f"{session_id}/runs/{index}")
        return artifacts.result_from_json(path.read_text(encoding="utf-8"))

    def write_report(self, session_id: str, index: int, kind: str,
                     report: validation.ValidationReport) -> dict:
        directory = self.root / session_id / "reports"
        directory.mkdir(parents=True, exist_ok=True)
        payload = {"kind": kind, **report.to_dict()}
        (directory / f"{index}.json").write_text(json.dumps(payload, sort_keys=True, indent=2),
                                                 encoding="utf-8")
        return {"index": index, "kind": kind, "overall": payload["overall"]}

    def read_report(self, session_id: str, index: int) -> dict:
        path = self.root / session_id / "reports" / f"{index}.json"
        if not path.exists():
            raise UnknownSession(f"{session_id}/reports/{index}")
        return json.loads(path.read_text(encoding="utf-8"))


def _now() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())


# ---------------------------------------------------------------------------
# configuration


@dataclass
class SimforgeConfig:
    store_dir: Path = Path("simforge_store")
    backend: str = "mock"  # mock | replay | record | live
    cache_path: Path | None = None
    endpoint: str = ""
    engine_id: str = "code-davinci-002"
    approach: promptkit.Approach = promptkit.Approach.A_DETAILED
    max_steps: int = 10_000_000
    max_series_points: int = 1_000_000

    @staticmethod
    def from_file(path: Path) -> "SimforgeConfig":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        config = SimforgeConfig()
        if "store_dir" in data:
            config.store_dir = Path(data["store_dir"])
        if "backend" in data:
            config.backend = data["backend"]
        if "cache_path" in data:
            config.cache_path = Path(data["cache_path"])
        if "endpoint" in data:
            config.endpoint = data["endpoint"]
        if "engine_id" in data:
            config.engine_id = data["engine_id"]
        if "approach" in data:
            config.approach = promptkit.Approach(data["approach"])
        if "max_steps" in data:
            config.max_steps = int(data["max_steps"])
        if "max_series_points" in data:
            config.max_series_points = int(data["max_series_points"])
        return config

    def limits(self) -> ExecLimits:
        return ExecLimits(max_steps=self.max_steps, max_series_points=self.max_series_points)


def make_backend(config: SimforgeConfig) -> llm.Backend:
    from .fixtures import PROSE_COMPLETION, default_fixtures

    if config.backend == "mock":
        return llm.MockBackend(default_fixtures(), default=PROSE_COMPLETION)
    if config.backend in ("replay", "record"):
        if config.cache_path is None:
            raise ValueError(f"{config.backend} backend requires cache_path")
        cache = llm.CompletionCache(config.cache_path)
        if config.backend == "replay":
            return llm.ReplayBackend(cache, "replay")
        return llm.ReplayBackend(cache, "record", live=llm.LiveBackend(config.endpoint))
    if config.backend == "live":
        if not config.endpoint:
            raise ValueError("live backend requires an endpoint")
        return llm.LiveBackend(config.endpoint)
    raise ValueError(f"unknown backend {config.backend!r}")


# ---------------------------------------------------------------------------
# pipeline operations


class Workflow:
    def __init__(self, store: SessionStore, config: SimforgeConfig | None = None,
                 backend: llm.Backend | None = None):
        self.store = store
        self.config = config or SimforgeConfig()
        self._backend = backend

    def backend(self) -> llm.Backend:
        if self._backend is None:
            self._backend = make_backend(self.config)
        return self._backend

    # -- submit

    def submit_description(self, description: str, mode: SessionMode,
                           frontend: FrontendKind) -> Session:
        if not description.strip():
            raise EmptyDescription()
        return self.store.create(description, mode, frontend)

    def edit_description(self, session_id: str, description: str) -> Session:
        """Revise the description of a not-yet-generated or rejected session."""
        if not description.strip():
            raise EmptyDescription()
        with self.store.lock(session_id):
            session = self.store.load(session_id)
            allowed = (SessionState.DESCRIBED, SessionState.REJECTED)
            if session.state not in allowed:
                raise WrongState("edit_description", session.state, allowed)
            self.store.append(session_id, "description_edited", {"description": description})
            return self.store.load(session_id)

    # -- generate

    def generate(self, session_id: str) -> Session:
        with self.store.lock(session_id):
            session = self.store.load(session_id)
            allowed = (SessionState.DESCRIBED, SessionState.PROMPT_BUILT, SessionState.REJECTED)
            if session.state not in allowed:
                raise WrongState("generate", session.state, allowed)
            if session.frontend is FrontendKind.DETERMINISTIC:
                self._generate_deterministic(session)
            else:
                self._generate_llm(session)
            return self.store.load(session_id)

    def _fail(self, session_id: str, stage: str, exc: Exception, extra: dict | None = None) -> None:
        payload = {"stage": stage, "error": type(exc).__name__, "message": str(exc)}
        if extra:
            payload.update(extra)
        self.store.append(session_id, "failed", payload)

    def _generate_deterministic(self, session: Session) -> None:
        try:
            spec = parse_controlled(session.description)
        except FrontendError as exc:
            self._fail(session.id, "generate", exc)
            return
        static = validation.check_static(spec)
        self.store.append(session.id, "generated", {
            "artifact_kind": "spec",
            "artifact_text": serialize_canonical(spec),
            "seed": spec.seed,
            "static_report": static.to_dict(),
        })

    def _generate_llm(self, session: Session) -> None:
        approach = self.config.approach
        try:
            bindings = extract_bindings(session.description)
            prompt = promptkit.build_prompt(approach, session.description, bindings)
        except (FrontendError, promptkit.EmptyDescription) as exc:
            self._fail(session.id, "generate", exc)
            return
        template = promptkit.load_template(approach)
        params = promptkit.GenerationParams(engine_id=self.config.engine_id)
        self.store.append(session.id, "prompt_built", {
            "prompt": prompt,
            "approach": approach.value,
            "template_id": template.template_id,
            "template_sha256": template.sha256,
            "params": {"temperature": params.temperature, "max_tokens": params.max_tokens,
                       "stop_sequences": list(params.stop_sequences), "engine_id": params.engine_id},
        })
        try:
            backend = self.backend()
            request = llm.CompletionRequest(prompt=prompt, params=params)
            response, attempts = llm.complete_with_retry(backend, request)
        except (llm.LlmError, ValueError) as exc:
            self._fail(session.id, "generate", exc)
            return
        try:
            artifact = codegen.parse_llm_output(response.completion)
        except (codegen.UnrecognizedArtifact, LexError, ParseError, CanonicalParseError) as exc:
            self._fail(session.id, "generate", exc, extra={
                "completion": response.completion, "backend": response.backend})
            return
        if isinstance(artifact, SimulationSpec):
            static = validation.check_static(artifact)
            artifact_kind = "spec"
            artifact_text = serialize_canonical(artifact)
            seed = artifact.seed
        else:
            static = validation.check_static(artifact, source=response.completion)
            artifact_kind = "program"
            artifact_text = response.completion
            ground = self._try_ground_truth_from_description(session.description)
            seed = ground.seed if ground is not None else 0
        self.store.append(session.id, "generated", {
            "artifact_kind": artifact_kind,
            "artifact_text": artifact_text,
            "seed": seed,
            "static_report": static.to_dict(),
            "completion": response.completion,
            "backend": response.backend,
            "attempts": attempts,
        })

    # -- approval

    def approve(self, session_id: str, actor: str, decision: str, reason: str = "") -> Session:
        with self.store.lock(session_id):
            session = self.store.load(session_id)
            if session.mode is not SessionMode.GATED or session.state is not SessionState.GENERATED:
                raise WrongState(f"{decision}", session.state, (SessionState.GENERATED,))
            if decision == "approve":
                self.store.append(session_id, "approved", {"actor": actor, "reason": reason})
            elif decision == "reject":
                if not reason.strip():
                    raise MissingReason()
                self.store.append(session_id, "rejected", {"actor": actor, "reason": reason})
            else:
                raise ValueError(f"decision must be approve or reject, got {decision!r}")
            return self.store.load(session_id)

    # -- execution

    def execute(self, session_id: str, seed: int | None = None) -> Session:
        with self.store.lock(session_id):
            session = self.store.load(session_id)
            if session.mode is SessionMode.GATED:
                allowed = (SessionState.APPROVED,)
            else:
                allowed = (SessionState.GENERATED,)
            if session.state not in allowed:
                raise WrongState("execute", session.state, allowed)
            effective_seed = session.seed if seed is None else seed
            run_index = len(session.runs)

            spec = self._artifact_spec(session)
            ground = spec or self._try_ground_truth_from_description(session.description)
            try:
                if spec is not None:
                    result = engines.run_spec(spec, effective_seed)
                else:
                    result = self._run_program(session, effective_seed, ground)
            except ExecError as exc:
                partial = getattr(exc, "partial_result", None)
                extra: dict = {"seed": effective_seed}
                if partial is not None:
                    output, steps = self._output_for(session, partial, ground)
                    self.store.write_run(session.id, run_index, partial, output, steps)
                    extra.update(partial_run_index=run_index, steps_used=partial.steps_used)
                self._fail(session.id, "execute", exc, extra=extra)
                return self.store.load(session_id)
            except (LexError, ParseError, ValueError) as exc:
                self._fail(session.id, "execute", exc, extra={"seed": effective_seed})
                return self.store.load(session_id)

            output, step_series = self._output_for(session, result, ground)
            self.store.write_run(session_id, run_index, result, output, step_series)
            self.store.append(session_id, "executed", {
                "run_index": run_index, "seed": effective_seed, "steps_used": result.steps_used})
            return self.store.load(session_id)

    def _artifact_spec(self, session: Session) -> SimulationSpec | None:
        if session.artifact_kind == "spec" and session.artifact_text:
            return parse_canonical(session.artifact_text)
        return None

    @staticmethod
    def _try_ground_truth_from_description(description: str) -> SimulationSpec | None:
        try:
            return parse_controlled(description)
        except FrontendError:
            return None

    def _run_program(self, session: Session, seed: int,
                     ground: SimulationSpec | None) -> RunResult:
        program = parse_source(session.artifact_text or "")
        if session.mode is SessionMode.GATED:
            report = static_check(program)
            if not report.ok:
                raise ValueError("static check violations block execution: "
                                 + "; ".join(map(str, report.violations)))
        result = interpret_with_partial(program, seed, self.config.limits())
        result.summary = validation.compute_summary(result, ground)
        return result

    def _output_for(self, session: Session, result: RunResult,
                    ground: SimulationSpec | None) -> tuple[OutputSpec, frozenset[str]]:
        spec = self._artifact_spec(session) or ground
        if spec is not None:
            step = frozenset({"system_size"}) if spec.queue is not None else frozenset()
            return spec.output, step
        plot = result.plot or {}
        series = tuple(result.series) or ("series",)
        output = OutputSpec(
            series=series,
            xlabel=plot.get("xlabel", "x"),
            ylabel=plot.get("ylabel", "y"),
            grid=bool(plot.get("grid", True)),
            legend=bool(plot.get("legend", True)),
            replenishment_markers=bool(result.events),
        )
        return output, frozenset({"system_size"} & set(result.series))

    # -- verification

    def verify(self, session_id: str, actor: str = "expert", note: str = "") -> Session:
        with self.store.lock(session_id):
            session = self.store.load(session_id)
            if session.state is not SessionState.EXECUTED:
                raise WrongState("verify", session.state, (SessionState.EXECUTED,))
            run = session.runs[-1]
            result = self.store.read_run(session_id, run["index"])
            ground = self._artifact_spec(session) or \
                self._try_ground_truth_from_description(session.description)

            report_refs = []
            next_index = len(session.reports)
            if ground is not None:
                dynamic = validation.check_dynamic(result, ground)
                report_refs.append(self.store.write_report(session_id, next_index, "dynamic", dynamic))
                oracle = validation.compare_to_oracle(result, ground, run["seed"])
                report_refs.append(self.store.write_report(session_id, next_index + 1, "oracle", oracle))
            else:
                skip = validation.ValidationReport((validation.Check(
                    "dynamic.ground_truth", validation.CheckStatus.SKIP,
                    detail="description is not controlled-parseable; no spec to check against"),))
                report_refs.append(self.store.write_report(session_id, next_index, "dynamic", skip))

            self.store.append(session_id, "verified", {
                "actor": actor, "note": note, "reports": report_refs})
            return self.store.load(session_id)

    # -- export

    def export(self, session_id: str, destination: Path) -> Path:
        session = self.store.load(session_id)
        destination = Path(destination)
        destination.mkdir(parents=True, exist_ok=True)
        summary_path = destination / f"{session_id}.json"
        summary_path.write_text(
            json.dumps(session.to_public_dict(), sort_keys=True, indent=2) + "\n", encoding="utf-8")
        return summary_path


def interpret_with_partial(program, seed: int, limits: ExecLimits) -> RunResult:
    """interpret(), but execution errors carry the partial trace for the log."""
    from .simscript.interpreter import _Interpreter

    runner = _Interpreter(seed, limits)
    try:
        runner.run_block(program.body)
    except ExecError as exc:
        exc.partial_result = runner.result
        raise
    return runner.result
