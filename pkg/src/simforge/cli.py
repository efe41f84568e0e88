"""simforge command line: drive sessions end to end from a shell."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .fixtures import DEMO_INVENTORY_DESCRIPTION, DEMO_QUEUE_DESCRIPTION
from .workflow import (
    FrontendKind,
    SessionMode,
    SessionStore,
    SimforgeConfig,
    Workflow,
    WorkflowError,
)


def _workflow(ctx: click.Context) -> Workflow:
    return ctx.obj


@click.group()
@click.option("--store", "store_dir", type=click.Path(path_type=Path),
              default=None, envvar="SIMFORGE_STORE", help="Session store directory.")
@click.option("--config", "config_path", type=click.Path(path_type=Path, exists=True),
              default=None, help="JSON config file (backend, endpoint, limits).")
@click.option("--backend", "backend_name", type=click.Choice(["mock", "replay", "record", "live"]),
              default=None, help="Override the completion backend.")
@click.pass_context
def main(ctx: click.Context, store_dir: Path | None, config_path: Path | None,
         backend_name: str | None) -> None:
    """From English descriptions of logistics systems to validated simulations."""
    config = SimforgeConfig.from_file(config_path) if config_path else SimforgeConfig()
    if store_dir is not None:
        config.store_dir = store_dir
    if backend_name is not None:
        config.backend = backend_name
    ctx.obj = Workflow(SessionStore(config.store_dir), config)


def _echo_session(session) -> None:
    click.echo(json.dumps(session.to_public_dict(), indent=2, sort_keys=True))


def _run_op(op):
    try:
        return op()
    except WorkflowError as exc:
        raise click.ClickException(str(exc)) from exc


@main.command()
@click.option("--mode", type=click.Choice([m.value for m in SessionMode]), default="gated")
@click.option("--frontend", type=click.Choice(["det", "llm"]), default="det")
@click.option("-f", "--file", "description_file", type=click.Path(path_type=Path, exists=True),
              default=None, help="Read the description from a file.")
@click.option("--text", default=None, help="Description given inline.")
@click.pass_context
def new(ctx: click.Context, mode: str, frontend: str, description_file: Path | None,
        text: str | None) -> None:
    """Create a session from an English description."""
    if (description_file is None) == (text is None):
        raise click.UsageError("provide exactly one of -f/--file or --text")
    description = description_file.read_text(encoding="utf-8") if description_file else text
    kind = FrontendKind.DETERMINISTIC if frontend == "det" else FrontendKind.LLM
    session = _run_op(lambda: _workflow(ctx).submit_description(
        description, SessionMode(mode), kind))
    click.echo(session.id)


@main.command()
@click.argument("session_id")
@click.option("-f", "--file", "description_file", type=click.Path(path_type=Path, exists=True),
              default=None)
@click.option("--text", default=None)
@click.pass_context
def edit(ctx: click.Context, session_id: str, description_file: Path | None,
         text: str | None) -> None:
    """Revise the description of a Described or Rejected session."""
    if (description_file is None) == (text is None):
        raise click.UsageError("provide exactly one of -f/--file or --text")
    description = description_file.read_text(encoding="utf-8") if description_file else text
    session = _run_op(lambda: _workflow(ctx).edit_description(session_id, description))
    click.echo(f"{session.id} {session.state.value}")


@main.command()
@click.argument("session_id")
@click.pass_context
def generate(ctx: click.Context, session_id: str) -> None:
    """Produce the simulation artifact (spec or program) for a session."""
    session = _run_op(lambda: _workflow(ctx).generate(session_id))
    click.echo(f"{session.id} {session.state.value}")
    if session.failure:
        click.echo(f"cause: {session.failure['error']}: {session.failure['message']}", err=True)


@main.command()
@click.argument("session_id")
@click.option("--actor", default="expert")
@click.option("--reason", default="")
@click.pass_context
def approve(ctx: click.Context, session_id: str, actor: str, reason: str) -> None:
    """Record expert approval of the generated artifact (gated mode)."""
    session = _run_op(lambda: _workflow(ctx).approve(session_id, actor, "approve", reason))
    click.echo(f"{session.id} {session.state.value}")


@main.command()
@click.argument("session_id")
@click.option("--actor", default="expert")
@click.option("--reason", required=True)
@click.pass_context
def reject(ctx: click.Context, session_id: str, actor: str, reason: str) -> None:
    """Record expert rejection; the session can be regenerated."""
    session = _run_op(lambda: _workflow(ctx).approve(session_id, actor, "reject", reason))
    click.echo(f"{session.id} {session.state.value}")


@main.command()
@click.argument("session_id")
@click.option("--seed", type=int, default=None, help="Override the session seed.")
@click.pass_context
def run(ctx: click.Context, session_id: str, seed: int | None) -> None:
    """Execute the approved artifact and write CSV/SVG run artifacts."""
    wf = _workflow(ctx)
    session = _run_op(lambda: wf.execute(session_id, seed=seed))
    click.echo(f"{session.id} {session.state.value}")
    if session.runs:
        run_dir = wf.store.run_dir(session_id, session.runs[-1]["index"])
        click.echo(f"artifacts: {run_dir}")
    if session.failure:
        click.echo(f"cause: {session.failure['error']}: {session.failure['message']}", err=True)


@main.command()
@click.argument("session_id")
@click.option("--actor", default="expert")
@click.option("--note", default="")
@click.pass_context
def verify(ctx: click.Context, session_id: str, actor: str, note: str) -> None:
    """Run the dynamic checks and oracle comparison; record the sign-off."""
    session = _run_op(lambda: _workflow(ctx).verify(session_id, actor=actor, note=note))
    click.echo(f"{session.id} {session.state.value}")
    for ref in session.reports:
        click.echo(f"report {ref['index']} ({ref['kind']}): {ref['overall']}")


@main.command()
@click.argument("session_id")
@click.option("--events", "show_events", is_flag=True, help="Include the raw event log.")
@click.pass_context
def show(ctx: click.Context, session_id: str, show_events: bool) -> None:
    """Print a session's full state as JSON."""
    session = _run_op(lambda: _workflow(ctx).store.load(session_id))
    data = session.to_public_dict()
    if show_events:
        data["events"] = session.events
    click.echo(json.dumps(data, indent=2, sort_keys=True))


@main.command(name="list")
@click.pass_context
def list_cmd(ctx: click.Context) -> None:
    """List sessions with their states."""
    for session in _workflow(ctx).store.list_sessions():
        click.echo(f"{session.id}  {session.state.value:<12} {session.mode.value:<14} "
                   f"{session.frontend.value:<13} {session.description[:60]!r}")


@main.command()
@click.argument("session_id")
@click.option("-o", "--output", "destination", type=click.Path(path_type=Path),
              default=Path("export"), help="Destination directory.")
@click.pass_context
def export(ctx: click.Context, session_id: str, destination: Path) -> None:
    """Write the session summary JSON to a directory."""
    path = _run_op(lambda: _workflow(ctx).export(session_id, destination))
    click.echo(str(path))


@main.command()
@click.argument("example", type=click.Choice(["inventory", "queue"]))
@click.option("--mode", type=click.Choice([m.value for m in SessionMode]), default="gated")
@click.pass_context
def demo(ctx: click.Context, example: str, mode: str) -> None:
    """Run a built-in example end to end on the mock backend."""
    wf = _workflow(ctx)
    wf.config.backend = "mock"
    wf._backend = None  # force mock regardless of earlier flags
    description = DEMO_INVENTORY_DESCRIPTION if example == "inventory" else DEMO_QUEUE_DESCRIPTION
    session = wf.submit_description(description, SessionMode(mode), FrontendKind.LLM)
    click.echo(f"session {session.id}")
    session = wf.generate(session.id)
    click.echo(f"generate -> {session.state.value} (artifact: {session.artifact_kind})")
    if session.mode is SessionMode.GATED:
        session = wf.approve(session.id, "demo-expert", "approve", "demo run")
        click.echo(f"approve  -> {session.state.value}")
    session = wf.execute(session.id)
    click.echo(f"execute  -> {session.state.value}")
    if session.state.value == "Failed":
        raise click.ClickException(f"{session.failure['error']}: {session.failure['message']}")
    session = wf.verify(session.id, actor="demo-expert")
    click.echo(f"verify   -> {session.state.value}")
    for ref in session.reports:
        click.echo(f"report {ref['index']} ({ref['kind']}): {ref['overall']}")
    run_dir = wf.store.run_dir(session.id, session.runs[-1]["index"])
    click.echo(f"artifacts: {run_dir}")


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8821)
@click.pass_context
def serve(ctx: click.Context, host: str, port: int) -> None:
    """Serve the HTTP API (and the browser UI when built)."""
    import uvicorn

    from .api import create_app

    wf = _workflow(ctx)
    uvicorn.run(create_app(wf), host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main(auto_envvar_prefix="SIMFORGE")
