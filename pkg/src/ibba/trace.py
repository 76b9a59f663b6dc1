"""Search traces as JSON lines.

The first line is a header::

    {"type": "header", "method": "ibba", "problem": "problem7", "m": 2, "a": -3.0, "b": 2.0}

followed by one record per trial::

    {"type": "trial", "k": 6, "x": -2.6352, "nu": 1, "raw": 0.1903, "zstar": null, "t": 1, "R_t": -3.8695}

``k`` is the creation number of the trial, ``t`` the 1-based position of the
subdivided interval and ``R_t`` its characteristic (both null for the two
initial trials).  Penalty traces add ``"pstar"`` and always have ``nu = m+1``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path


class TraceError(ValueError):
    pass


@dataclass
class Trace:
    method: str
    problem: str
    m: int
    a: float
    b: float
    records: list[dict] = field(default_factory=list)

    def header(self) -> dict:
        return {"type": "header", "method": self.method, "problem": self.problem,
                "m": self.m, "a": self.a, "b": self.b}

    def dumps(self) -> str:
        lines = [json.dumps(self.header())]
        lines.extend(json.dumps({"type": "trial", **r}) for r in self.records)
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "Trace":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise TraceError("empty trace file")
        try:
            head = json.loads(lines[0])
            records = [json.loads(ln) for ln in lines[1:]]
        except json.JSONDecodeError as exc:
            raise TraceError(f"malformed trace: {exc}") from None
        if head.get("type") != "header":
            raise TraceError("trace does not start with a header record")
        for r in records:
            r.pop("type", None)
        return cls(head["method"], head["problem"], int(head["m"]), float(head["a"]), float(head["b"]), records)

    def write(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def read(cls, path) -> "Trace":
        return cls.loads(Path(path).read_text())
