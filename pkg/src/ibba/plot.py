"""Dynamic search diagrams as SVG.

The upper panel shows the objective over ``[a, b]`` with the feasible parts
drawn bold.  Below the axis, each index level gets one row of ``+`` marks, one
mark per trial at its ``x``: the top row holds trials that failed ``g_1``,
the next row those that failed ``g_2``, and the last row the trials where the
objective was evaluated.  Penalty traces have a single row.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

from .expr import EvaluationError
from .problem import ProblemSpec
from .trace import Trace, TraceError

WIDTH, HEIGHT = 900, 675
LEFT, RIGHT = 80, 860
CURVE_TOP, CURVE_BOTTOM = 50, 400
ROW_START, ROW_GAP = 440, 28
SAMPLES = 600


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _index_of(spec: ProblemSpec, x: float):
    for j, g in enumerate(spec.constraints, start=1):
        if g(x) > 0:
            return j
    return spec.m + 1


def _sample(spec: ProblemSpec):
    """(x, f(x) or None, feasible) on a uniform grid; undefined points give None."""
    out = []
    for i in range(SAMPLES + 1):
        x = spec.a + (spec.b - spec.a) * i / SAMPLES
        try:
            feasible = _index_of(spec, x) == spec.m + 1
        except EvaluationError:
            feasible = False
        try:
            fx = spec.objective(x)
        except EvaluationError:
            fx = None
        out.append((x, fx, feasible))
    return out


def check_trace(trace: Trace, spec: ProblemSpec) -> None:
    if trace.problem != spec.name or trace.m != spec.m or (trace.a, trace.b) != (spec.a, spec.b):
        raise TraceError(
            f"trace of {trace.problem!r} (m={trace.m}, [{trace.a}, {trace.b}]) does not match "
            f"problem {spec.name!r} (m={spec.m}, [{spec.a}, {spec.b}])"
        )
    for r in trace.records:
        if not spec.a <= r["x"] <= spec.b:
            raise TraceError(f"trial k={r.get('k')} at x={r['x']} lies outside the domain")
        if not 1 <= r["nu"] <= spec.m + 1:
            raise TraceError(f"trial k={r.get('k')} has index {r['nu']} outside 1..{spec.m + 1}")


def render_svg(trace: Trace, spec: ProblemSpec) -> str:
    check_trace(trace, spec)
    samples = _sample(spec)
    values = [fx for _, fx, _ in samples if fx is not None]
    lo, hi = (min(values), max(values)) if values else (0.0, 1.0)
    if hi == lo:
        lo, hi = lo - 1.0, hi + 1.0
    pad = 0.05 * (hi - lo)
    lo, hi = lo - pad, hi + pad

    def px(x):
        return LEFT + (x - spec.a) / (spec.b - spec.a) * (RIGHT - LEFT)

    def py(v):
        return CURVE_BOTTOM - (v - lo) / (hi - lo) * (CURVE_BOTTOM - CURVE_TOP)

    rows = [spec.m + 1] if trace.method == "pen" else list(range(1, spec.m + 2))
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<title>{escape(spec.name)} ({escape(trace.method.upper())})</title>',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<g class="axes" stroke="black" stroke-width="1">',
        f'<line x1="{LEFT}" y1="{CURVE_BOTTOM}" x2="{RIGHT}" y2="{CURVE_BOTTOM}"/>',
        f'<line x1="{LEFT}" y1="{CURVE_TOP}" x2="{LEFT}" y2="{CURVE_BOTTOM}"/>',
        "</g>",
        f'<text x="{LEFT}" y="{CURVE_BOTTOM + 16}" text-anchor="middle">{spec.a:g}</text>',
        f'<text x="{RIGHT}" y="{CURVE_BOTTOM + 16}" text-anchor="end">{spec.b:g}</text>',
        f'<text x="{LEFT - 6}" y="{_fmt(py(hi - pad))}" text-anchor="end">{hi - pad:.4g}</text>',
        f'<text x="{LEFT - 6}" y="{_fmt(py(lo + pad))}" text-anchor="end">{lo + pad:.4g}</text>',
    ]

    # curve, broken where the objective is undefined; feasible runs drawn bold
    for cls, width, keep in (("curve", 1, lambda s: True), ("feasible", 3, lambda s: s[2])):
        run = []
        for s in samples + [(None, None, False)]:
            if s[1] is not None and keep(s):
                run.append(f"{_fmt(px(s[0]))},{_fmt(py(s[1]))}")
                continue
            if len(run) > 1 or (run and cls == "feasible"):
                pts = run if len(run) > 1 else run * 2
                out.append(f'<polyline class="{cls}" fill="none" stroke="black" '
                           f'stroke-width="{width}" points="{" ".join(pts)}"/>')
            run = []

    for r, level in enumerate(rows):
        y = ROW_START + r * ROW_GAP
        label = "f" if level == spec.m + 1 else f"g{level}"
        if trace.method == "pen":
            label = "F"
        marks = [rec for rec in trace.records if trace.method == "pen" or rec["nu"] == level]
        out.append(f'<text x="{LEFT - 10}" y="{y + 4}" text-anchor="end">{label} ({len(marks)})</text>')
        out.append(f'<g class="row level-{level}" stroke="black" stroke-width="1">')
        for rec in marks:
            cx = px(rec["x"])
            out.append(f'<path class="mark" d="M{_fmt(cx - 3)} {y} h6 M{_fmt(cx)} {y - 3} v6"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
