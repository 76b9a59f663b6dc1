import os
import re
import xml.etree.ElementTree as ET
from pathlib import Path

import pytest

from ibba.fixtures import problem7, small_fixtures
from ibba.penalty import tune_penalty
from ibba.plot import HEIGHT, WIDTH, render_svg
from ibba.problem import ProblemSpec
from ibba.solver import SolverConfig, solve
from ibba.trace import Trace, TraceError

GOLDEN = Path(__file__).parent / "golden"
SVG = "{http://www.w3.org/2000/svg}"


def ibba_trace(spec, **kw):
    out = solve(spec, SolverConfig(emit_trace=True, **kw))
    return out, Trace("ibba", spec.name, spec.m, spec.a, spec.b, out.trace)


def rows(svg: str) -> dict[str, int]:
    root = ET.fromstring(svg)
    out = {}
    for g in root.iter(f"{SVG}g"):
        cls = g.get("class", "")
        if cls.startswith("row "):
            out[cls.split()[1]] = len(g.findall(f"{SVG}path"))
    return out


class TestRender:
    def test_ibba_rows_match_ledger(self):
        spec = problem7()
        out, trace = ibba_trace(spec)
        svg = render_svg(trace, spec)
        assert rows(svg) == {"level-1": out.ledger.counts[0], "level-2": out.ledger.counts[1],
                             "level-3": out.ledger.n_f}

    def test_pen_single_row(self):
        spec = problem7()
        pen = tune_penalty(spec, emit_trace=True)
        trace = Trace("pen", spec.name, spec.m, spec.a, spec.b, pen.trace)
        assert rows(render_svg(trace, spec)) == {"level-3": pen.ledger.iterations}

    def test_empty_trace_is_valid(self):
        spec = problem7()
        svg = render_svg(Trace("ibba", spec.name, spec.m, spec.a, spec.b, []), spec)
        root = ET.fromstring(svg)
        assert root.get("width") == str(WIDTH) and root.get("height") == str(HEIGHT)
        assert (WIDTH, HEIGHT) == (900, 675)
        assert set(rows(svg).values()) == {0}

    def test_feasible_segments_bold(self):
        spec = problem7()
        svg = render_svg(Trace("ibba", spec.name, spec.m, spec.a, spec.b, []), spec)
        # two feasible subregions on [-3, 2]
        assert len(re.findall(r'class="feasible"', svg)) == 2

    def test_undefined_objective_breaks_curve(self):
        spec = ProblemSpec.from_strings("holes", -1, 1, ("log(abs(x)-0.2)", 1.0))
        svg = render_svg(Trace("ibba", "holes", 0, -1.0, 1.0, []), spec)
        assert len(re.findall(r'class="curve"', svg)) == 2

    @pytest.mark.parametrize(
        "change",
        [{"problem": "other"}, {"m": 1}, {"b": 3.0}],
    )
    def test_mismatched_trace(self, change):
        spec = problem7()
        fields = dict(method="ibba", problem=spec.name, m=spec.m, a=spec.a, b=spec.b, records=[])
        fields.update(change)
        with pytest.raises(TraceError):
            render_svg(Trace(**fields), spec)

    @pytest.mark.parametrize("record", [{"k": 0, "x": 5.0, "nu": 1}, {"k": 0, "x": 0.0, "nu": 4}])
    def test_records_outside_problem(self, record):
        spec = problem7()
        with pytest.raises(TraceError):
            render_svg(Trace("ibba", spec.name, spec.m, spec.a, spec.b, [record]), spec)

    def test_deterministic(self):
        spec = small_fixtures()[0]
        _, trace = ibba_trace(spec)
        assert render_svg(trace, spec) == render_svg(Trace.loads(trace.dumps()), spec)


def test_golden_small_fixture():
    spec = small_fixtures()[1]
    _, trace = ibba_trace(spec, epsilon=1e-2)
    svg = render_svg(trace, spec)
    path = GOLDEN / "small-two-ibba.svg"
    if os.environ.get("IBBA_REGENERATE_GOLDEN"):
        path.write_text(svg)
    assert svg == path.read_text()
