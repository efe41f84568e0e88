"""Run artifacts: CSV trace dumps, SVG plots, JSON serialization.

All output is reproducible byte for byte: numbers use the canonical
formatter, the SVG is generated directly (no plotting library, no
timestamps or random ids), and dictionaries keep recording order.
"""

from __future__ import annotations

import json

from .ir import OutputSpec, format_number
from .simscript import RunResult

CSV_HEADER = "series,x,y"

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

_WIDTH, _HEIGHT = 640, 440
_ML, _MR, _MT, _MB = 62, 20, 20, 52


def series_csv(result: RunResult) -> str:
    """header `series,x,y`, LF line endings, '.' decimal point."""
    lines = [CSV_HEADER]
    for name, points in result.series.items():
        for x, y in points:
            lines.append(f"{name},{format_number(x)},{format_number(y)}")
    return "\n".join(lines) + "\n"


def result_to_dict(result: RunResult) -> dict:
    return {
        "seed": result.seed,
        "steps_used": result.steps_used,
        "series": {name: [[x, y] for x, y in pts] for name, pts in result.series.items()},
        "events": [[name, x] for name, x in result.events],
        "summary": result.summary,
        "plot": result.plot,
    }


def result_from_dict(data: dict) -> RunResult:
    return RunResult(
        series={name: [(x, y) for x, y in pts] for name, pts in data["series"].items()},
        events=[(name, x) for name, x in data["events"]],
        summary=dict(data.get("summary", {})),
        seed=int(data.get("seed", 0)),
        steps_used=int(data.get("steps_used", 0)),
        plot=data.get("plot"),
    )


def result_to_json(result: RunResult) -> str:
    return json.dumps(result_to_dict(result), sort_keys=True) + "\n"


def result_from_json(text: str) -> RunResult:
    return result_from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# SVG plot


def _nice_ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw_step = (hi - lo) / target
    magnitude = 10.0 ** int(f"{raw_step:e}".split("e")[1])
    for mult in (1, 2, 5, 10):
        step = mult * magnitude
        if step >= raw_step:
            break
    first = step * int(lo / step)
    if first < lo - 1e-12:
        first += step
    ticks = []
    value = first
    while value <= hi + step * 1e-9:
        ticks.append(round(value, 10))
        value += step
    return ticks


def _fmt(value: float) -> str:
    return f"{value:.2f}".rstrip("0").rstrip(".")


class _Scale:
    def __init__(self, lo: float, hi: float, pixel_lo: float, pixel_hi: float):
        self.lo, self.hi = lo, hi
        self.pixel_lo, self.pixel_hi = pixel_lo, pixel_hi
        self.span = hi - lo if hi > lo else 1.0

    def __call__(self, value: float) -> float:
        frac = (value - self.lo) / self.span
        return self.pixel_lo + frac * (self.pixel_hi - self.pixel_lo)


def plot_svg(result: RunResult, output: OutputSpec, step_series: frozenset[str] = frozenset()) -> str:
    """Line plot of the spec-selected series.

    Step-after rendering for the names in ``step_series``; replenishment
    events become vertical dashed markers when the spec asks for them.
    """
    plotted = [(name, result.series[name]) for name in output.series if name in result.series]
    xs = [x for _, pts in plotted for x, _ in pts]
    ys = [y for _, pts in plotted for _, y in pts]
    x_lo, x_hi = (min(xs), max(xs)) if xs else (0.0, 1.0)
    y_lo, y_hi = (min(0.0, min(ys)), max(ys)) if ys else (0.0, 1.0)
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    y_hi += 0.05 * (y_hi - y_lo)

    sx = _Scale(x_lo, x_hi, _ML, _WIDTH - _MR)
    sy = _Scale(y_lo, y_hi, _HEIGHT - _MB, _MT)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
    ]

    x_ticks = _nice_ticks(x_lo, x_hi)
    y_ticks = _nice_ticks(y_lo, y_hi)
    if output.grid:
        for t in x_ticks:
            parts.append(f'<line x1="{_fmt(sx(t))}" y1="{_MT}" x2="{_fmt(sx(t))}" '
                         f'y2="{_HEIGHT - _MB}" stroke="#dddddd" stroke-width="1"/>')
        for t in y_ticks:
            parts.append(f'<line x1="{_ML}" y1="{_fmt(sy(t))}" x2="{_WIDTH - _MR}" '
                         f'y2="{_fmt(sy(t))}" stroke="#dddddd" stroke-width="1"/>')

    if output.replenishment_markers:
        for name, x in result.events:
            if name == "replenishment" and x_lo <= x <= x_hi:
                parts.append(
                    f'<line class="replenishment-marker" x1="{_fmt(sx(x))}" y1="{_MT}" '
                    f'x2="{_fmt(sx(x))}" y2="{_HEIGHT - _MB}" stroke="#999999" '
                    f'stroke-width="1" stroke-dasharray="4 3"/>')

    for idx, (name, pts) in enumerate(plotted):
        color = _PALETTE[idx % len(_PALETTE)]
        coords: list[str] = []
        prev_y: float | None = None
        for x, y in pts:
            px, py = sx(x), sy(y)
            if name in step_series and prev_y is not None:
                coords.append(f"{_fmt(px)},{_fmt(sy(prev_y))}")
            coords.append(f"{_fmt(px)},{_fmt(py)}")
            prev_y = y
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                     f'points="{" ".join(coords)}" data-series="{name}"/>')

    # axes over the data
    parts.append(f'<line x1="{_ML}" y1="{_HEIGHT - _MB}" x2="{_WIDTH - _MR}" '
                 f'y2="{_HEIGHT - _MB}" stroke="black" stroke-width="1"/>')
    parts.append(f'<line x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{_HEIGHT - _MB}" '
                 f'stroke="black" stroke-width="1"/>')
    for t in x_ticks:
        parts.append(f'<text x="{_fmt(sx(t))}" y="{_HEIGHT - _MB + 16}" '
                     f'text-anchor="middle">{format_number(t)}</text>')
    for t in y_ticks:
        parts.append(f'<text x="{_ML - 6}" y="{_fmt(sy(t) + 4)}" '
                     f'text-anchor="end">{format_number(t)}</text>')
    parts.append(f'<text x="{(_ML + _WIDTH - _MR) / 2:.0f}" y="{_HEIGHT - 12}" '
                 f'text-anchor="middle">{output.xlabel}</text>')
    parts.append(f'<text x="16" y="{(_MT + _HEIGHT - _MB) / 2:.0f}" text-anchor="middle" '
                 f'transform="rotate(-90 16 {(_MT + _HEIGHT - _MB) / 2:.0f})">{output.ylabel}</text>')

    if output.legend and plotted:
        lx, ly = _WIDTH - _MR - 150, _MT + 8
        parts.append(f'<rect x="{lx - 8}" y="{ly - 6}" width="150" '
                     f'height="{18 * len(plotted) + 6}" fill="white" stroke="#cccccc"/>')
        for idx, (name, _) in enumerate(plotted):
            color = _PALETTE[idx % len(_PALETTE)]
            y = ly + 8 + idx * 18
            parts.append(f'<line x1="{lx}" y1="{y}" x2="{lx + 22}" y2="{y}" '
                         f'stroke="{color}" stroke-width="2"/>')
            parts.append(f'<text x="{lx + 28}" y="{y + 4}">{name}</text>')

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
