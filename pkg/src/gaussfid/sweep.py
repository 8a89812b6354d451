"""Parameter sweeps over a pair of templated state documents.

A sweep spec looks like::

    {
      "template": [{"kind": "gaussian", "n": 1, "mean": [0, 0],
                    "cov": [["$b", 0], [0, "$b"]]},
                   {"kind": "gaussian", "n": 1, "mean": [0, 0],
                    "cov": [[0.5, 0], [0, 0.5]]}],
      "grid": {"b": {"start": 0.5, "stop": 2.5, "steps": 5}},
      "outputs": ["fidelity", "bures"]
    }

Any numeric field of either template may be replaced by a string ``"$name"``.
Every placeholder needs a grid entry and every grid entry must be used.
Grid points are visited in lexicographic order: placeholder names sorted,
the first name varying slowest.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterator

import numpy as np

from .documents import parse_document
from .errors import GaussfidError, MalformedInputError
from .fidelity import fidelity
from .tolerances import DEFAULT, Tolerances

OUTPUTS = ("fidelity", "overlap", "bures", "delta", "gamma", "lambda")
# fields that are structural, not numeric
_NON_NUMERIC = {"kind", "n", "op", "mode", "modes"}


@dataclass(frozen=True)
class GridAxis:
    start: float
    stop: float
    steps: int

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)


@dataclass(frozen=True)
class SweepSpec:
    template: tuple[Any, Any]
    grid: dict[str, GridAxis]
    outputs: tuple[str, ...]

    @property
    def names(self) -> list[str]:
        return sorted(self.grid)

    def points(self) -> Iterator[dict[str, float]]:
        names = self.names
        for combo in itertools.product(*(self.grid[k].values() for k in names)):
            yield {k: float(v) for k, v in zip(names, combo)}


@dataclass(frozen=True)
class SweepResult:
    rows: list[list[str]]
    header: list[str]
    succeeded: int
    failed: int
    first_error_code: int | None = None

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        w.writerows(self.rows)
        return buf.getvalue()


def _placeholder(x) -> str | None:
    if isinstance(x, str) and x.startswith("$") and len(x) > 1:
        return x[1:]
    return None


def _collect(doc, key=None, found=None) -> set[str]:
    found = set() if found is None else found
    if isinstance(doc, dict):
        for k, v in doc.items():
            _collect(v, k, found)
    elif isinstance(doc, list):
        for v in doc:
            _collect(v, key, found)
    else:
        name = _placeholder(doc)
        if name is not None:
            if key in _NON_NUMERIC:
                raise MalformedInputError(f"placeholder ${name} sits in non-numeric field {key!r}")
            found.add(name)
    return found


def substitute(doc, values: dict[str, float]):
    if isinstance(doc, dict):
        return {k: substitute(v, values) for k, v in doc.items()}
    if isinstance(doc, list):
        return [substitute(v, values) for v in doc]
    name = _placeholder(doc)
    return values[name] if name is not None else doc


def _axis(name: str, d) -> GridAxis:
    if not isinstance(d, dict) or set(d) != {"start", "stop", "steps"}:
        raise MalformedInputError(f"grid.{name}: expected an object with start, stop, steps")
    start, stop, steps = d["start"], d["stop"], d["steps"]
    for label, v in (("start", start), ("stop", stop)):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise MalformedInputError(f"grid.{name}.{label}: expected a finite number")
    if isinstance(steps, bool) or not isinstance(steps, int) or steps < 1:
        raise MalformedInputError(f"grid.{name}.steps: expected an integer >= 1")
    if start > stop:
        raise MalformedInputError(f"grid.{name}: start {start} > stop {stop}")
    return GridAxis(float(start), float(stop), steps)


def parse_sweep(doc: Any) -> SweepSpec:
    if not isinstance(doc, dict) or set(doc) != {"template", "grid", "outputs"}:
        raise MalformedInputError("sweep spec needs exactly the fields template, grid, outputs")
    template = doc["template"]
    if not isinstance(template, list) or len(template) != 2:
        raise MalformedInputError("template must be a list of two state documents")
    if not isinstance(doc["grid"], dict) or not doc["grid"]:
        raise MalformedInputError("grid must be a non-empty object")
    grid = {name: _axis(name, d) for name, d in doc["grid"].items()}
    outputs = doc["outputs"]
    if not isinstance(outputs, list) or not outputs or any(o not in OUTPUTS for o in outputs):
        raise MalformedInputError(f"outputs must be a non-empty subset of {list(OUTPUTS)}")
    if len(set(outputs)) != len(outputs):
        raise MalformedInputError("outputs contain duplicates")
    used = _collect(template)
    if used != set(grid):
        raise MalformedInputError(
            f"placeholders {sorted(used)} do not match grid entries {sorted(grid)}"
        )
    return SweepSpec((template[0], template[1]), grid, tuple(outputs))


def load_sweep(path: str | Path) -> SweepSpec:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise MalformedInputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return parse_sweep(json.loads(text))
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"invalid JSON: {exc}") from None


def _fmt(x: float | None) -> str:
    return "" if x is None else f"{x:.12g}"


def _error_tag(exc: GaussfidError) -> str:
    return {2: "malformed", 3: "unphysical", 4: "unsupported", 5: "numerical"}.get(exc.exit_code, "failed")


def evaluate_point(spec: SweepSpec, values: dict[str, float], tol: Tolerances = DEFAULT) -> dict[str, float | None]:
    a = parse_document(substitute(spec.template[0], values), tol).require_valid()
    b = parse_document(substitute(spec.template[1], values), tol).require_valid()
    rep = fidelity(a, b, tol)
    t = rep.invariants
    return {
        "fidelity": rep.fidelity,
        "overlap": rep.overlap,
        "bures": rep.bures_distance,
        "delta": t.delta if t else None,
        "gamma": t.gamma if t else None,
        "lambda": t.lam if t else None,
    }


def run_sweep(spec: SweepSpec, tol: Tolerances = DEFAULT) -> SweepResult:
    names = spec.names
    header = names + list(spec.outputs) + ["status"]
    rows, ok, bad, code = [], 0, 0, None
    for values in spec.points():
        lead = [_fmt(values[k]) for k in names]
        try:
            out = evaluate_point(spec, values, tol)
        except GaussfidError as exc:
            rows.append(lead + [""] * len(spec.outputs) + [f"error:{_error_tag(exc)}"])
            bad += 1
            code = code or exc.exit_code
            continue
        rows.append(lead + [_fmt(out[o]) for o in spec.outputs] + ["ok"])
        ok += 1
    return SweepResult(rows, header, ok, bad, code)
