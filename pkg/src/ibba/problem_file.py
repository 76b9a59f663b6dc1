"""Plain-text problem files.

Example::

    # differentiable problem 7
    name: problem7
    domain: -3 2
    constraint K=6.5: sin(x)^3*exp(-sin(3*x))+1/2
    constraint K=10: cos(7/5*(x+3))-sin(7*(x+3))+3/10
    objective K=7.5: exp(-cos(4*x-3))+(4*x-3)^2/250-1
    reference: -0.774575 -0.3300741

One directive per line, ``#`` starts a comment.  Constraints are evaluated in
file order.  ``constraint K=... partial:`` marks a constraint that is defined
only where the earlier ones hold.  ``reference`` is optional.
"""

from __future__ import annotations

from pathlib import Path

from .expr import ParseError, parse
from .problem import Function, ProblemError, ProblemSpec, validate


class ProblemFileError(ValueError):
    """Rendered as ``source:line: message`` with the parts that are known."""

    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        where = "".join(f"{part}:" for part in (source, line) if part is not None)
        super().__init__(f"{where} {message}" if where else message)
        self.message = message
        self.line = line
        self.source = source


def _parse_float(text: str, line: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise ProblemFileError(f"not a number: {text!r}", line) from None


def _parse_function(header: list[str], body: str, line: int, allow_partial: bool) -> Function:
    K = None
    partial = False
    for word in header:
        if word.startswith("K="):
            K = _parse_float(word[2:], line)
        elif word == "partial" and allow_partial:
            partial = True
        else:
            raise ProblemFileError(f"unexpected attribute {word!r}", line)
    if K is None:
        raise ProblemFileError("missing Lipschitz overestimate K=...", line)
    try:
        expr = parse(body)
    except ParseError as exc:
        raise ProblemFileError(f"expression: {exc}", line) from None
    return Function(expr, K, partial)


def parse_problem(text: str, source: str | None = None) -> ProblemSpec:
    name = None
    domain = None
    reference = None
    constraints = []
    objective = None
    try:
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if ":" not in line:
                raise ProblemFileError("expected 'key: value'", lineno)
            head, body = (s.strip() for s in line.split(":", 1))
            words = head.split()
            key = words[0]
            if key == "name":
                name = body
            elif key == "domain":
                parts = body.replace(",", " ").split()
                if len(parts) != 2:
                    raise ProblemFileError("domain needs two numbers", lineno)
                domain = tuple(_parse_float(p, lineno) for p in parts)
            elif key == "reference":
                parts = body.split()
                if len(parts) != 2:
                    raise ProblemFileError("reference needs x and f", lineno)
                reference = tuple(_parse_float(p, lineno) for p in parts)
            elif key == "constraint":
                constraints.append(_parse_function(words[1:], body, lineno, allow_partial=True))
            elif key == "objective":
                if objective is not None:
                    raise ProblemFileError("objective given twice", lineno)
                objective = _parse_function(words[1:], body, lineno, allow_partial=False)
            else:
                raise ProblemFileError(f"unknown directive {key!r}", lineno)
        if name is None:
            raise ProblemFileError("missing 'name:'")
        if domain is None:
            raise ProblemFileError("missing 'domain:'")
        if objective is None:
            raise ProblemFileError("missing 'objective'")
    except ProblemFileError as exc:
        if source is not None:
            raise ProblemFileError(exc.message, exc.line, source) from None
        raise
    spec = ProblemSpec(name, domain[0], domain[1], tuple(constraints), objective, reference)
    errors = validate(spec)
    if errors:
        raise ProblemError(errors)
    return spec


def format_problem(spec: ProblemSpec) -> str:
    lines = [f"name: {spec.name}", f"domain: {spec.a!r} {spec.b!r}"]
    for g in spec.constraints:
        flag = " partial" if g.partial else ""
        lines.append(f"constraint K={g.K!r}{flag}: {g.expr.text}")
    lines.append(f"objective K={spec.objective.K!r}: {spec.objective.expr.text}")
    if spec.reference is not None:
        lines.append(f"reference: {spec.reference[0]!r} {spec.reference[1]!r}")
    return "\n".join(lines) + "\n"


def load_problem(path) -> ProblemSpec:
    path = Path(path)
    return parse_problem(path.read_text(), source=str(path))


def save_problem(spec: ProblemSpec, path) -> None:
    Path(path).write_text(format_problem(spec))
