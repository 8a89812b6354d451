"""JSON state documents.

Three kinds are accepted::

    {"kind": "gaussian", "n": 1, "mean": [0, 0], "cov": [[0.5, 0], [0, 0.5]]}
    {"kind": "standard-form", "b1": 1, "b2": 1, "c": 0.5, "d": -0.5, "mean": [0, 0, 0, 0]}
    {"kind": "circuit", "n": 2, "ops": [{"op": "thermal", "mode": 0, "mean_photons": 1},
                                       {"op": "squeeze", "mode": 0, "r": 0.3, "phase": 0},
                                       {"op": "rotate", "mode": 1, "angle": 0.2},
                                       {"op": "beamsplit", "modes": [0, 1], "angle": 0.7, "phase": 0},
                                       {"op": "displace", "mode": 1, "q": 1.0, "p": -0.5}]}

Matrices are row-major nested lists. ``mean`` is optional for the
standard form (zero by default).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .circuit import (
    BeamSplit,
    Displace,
    GaussianCircuit,
    Rotate,
    Squeeze,
    ThermalInit,
    circuit_to_gaussian,
)
from .errors import DimensionError, MalformedInputError, UnphysicalStateError
from .symplectic import GaussianState, StandardFormParams, ValidationReport, standard_form_state, validate_state
from .tolerances import DEFAULT, Tolerances

KINDS = ("gaussian", "standard-form", "circuit")

_OP_FIELDS = {
    "thermal": ("mode", "mean_photons"),
    "squeeze": ("mode", "r", "phase"),
    "rotate": ("mode", "angle"),
    "beamsplit": ("modes", "angle", "phase"),
    "displace": ("mode", "q", "p"),
}
_OPTIONAL = {"phase"}


@dataclass(frozen=True)
class LoadedState:
    """A parsed document: the state, its validation verdict, and its source form."""

    state: GaussianState
    validation: ValidationReport
    kind: str
    source: StandardFormParams | GaussianCircuit | None = None

    def require_valid(self) -> GaussianState:
        if not self.validation.valid:
            v = self.validation
            raise UnphysicalStateError(f"unphysical state ({v.failing}: {v.detail})")
        return self.state


def _number(x, where: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise MalformedInputError(f"{where}: expected a number, got {x!r}")
    if not math.isfinite(x):
        raise MalformedInputError(f"{where}: non-finite value")
    return float(x)


def _integer(x, where: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise MalformedInputError(f"{where}: expected an integer, got {x!r}")
    return x


def _vector(x, length: int, where: str) -> np.ndarray:
    if not isinstance(x, list):
        raise MalformedInputError(f"{where}: expected a list")
    if len(x) != length:
        raise DimensionError(f"{where}: expected {length} entries, got {len(x)}")
    return np.array([_number(v, f"{where}[{i}]") for i, v in enumerate(x)])


def _matrix(x, size: int, where: str) -> np.ndarray:
    if not isinstance(x, list):
        raise MalformedInputError(f"{where}: expected a list of rows")
    if len(x) != size:
        raise DimensionError(f"{where}: expected {size} rows, got {len(x)}")
    return np.array([_vector(row, size, f"{where}[{i}]") for i, row in enumerate(x)])


def _check_keys(doc: dict, required, optional=(), where="document") -> None:
    missing = [k for k in required if k not in doc]
    if missing:
        raise MalformedInputError(f"{where}: missing field(s) {missing}")
    extra = set(doc) - set(required) - set(optional)
    if extra:
        raise MalformedInputError(f"{where}: unknown field(s) {sorted(extra)}")


def _parse_op(d: Any, i: int):
    where = f"ops[{i}]"
    if not isinstance(d, dict) or "op" not in d:
        raise MalformedInputError(f"{where}: expected an object with an 'op' field")
    name = d["op"]
    if name not in _OP_FIELDS:
        raise MalformedInputError(f"{where}: unknown op {name!r}; expected one of {sorted(_OP_FIELDS)}")
    fields = _OP_FIELDS[name]
    _check_keys(d, ["op"] + [f for f in fields if f not in _OPTIONAL],
                [f for f in fields if f in _OPTIONAL], where)
    num = {f: _number(d[f], f"{where}.{f}") for f in fields if f not in ("mode", "modes") and f in d}
    if name == "beamsplit":
        modes = d["modes"]
        if not isinstance(modes, list) or len(modes) != 2:
            raise MalformedInputError(f"{where}.modes: expected two mode indices")
        a, b = (_integer(m, f"{where}.modes") for m in modes)
        return BeamSplit(a, b, num["angle"], num.get("phase", 0.0))
    mode = _integer(d["mode"], f"{where}.mode")
    if name == "thermal":
        return ThermalInit(mode, num["mean_photons"])
    if name == "squeeze":
        return Squeeze(mode, num["r"], num.get("phase", 0.0))
    if name == "rotate":
        return Rotate(mode, num["angle"])
    return Displace(mode, num["q"], num["p"])


def parse_document(doc: Any, tol: Tolerances = DEFAULT) -> LoadedState:
    if not isinstance(doc, dict):
        raise MalformedInputError("state document must be a JSON object")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise MalformedInputError(f"unknown or missing kind {kind!r}; expected one of {list(KINDS)}")

    source = None
    if kind == "gaussian":
        _check_keys(doc, ["kind", "n", "mean", "cov"])
        n = _integer(doc["n"], "n")
        if n < 1:
            raise DimensionError(f"n must be positive (got {n})")
        state = GaussianState(_vector(doc["mean"], 2 * n, "mean"), _matrix(doc["cov"], 2 * n, "cov"), tol=tol)
    elif kind == "standard-form":
        _check_keys(doc, ["kind", "b1", "b2", "c", "d"], ["mean"])
        source = StandardFormParams(*(_number(doc[k], k) for k in ("b1", "b2", "c", "d")))
        mean = _vector(doc["mean"], 4, "mean") if "mean" in doc else None
        state = standard_form_state(source, mean)
    else:
        _check_keys(doc, ["kind", "n", "ops"])
        n = _integer(doc["n"], "n")
        if not isinstance(doc["ops"], list):
            raise MalformedInputError("ops: expected a list")
        source = GaussianCircuit(n, tuple(_parse_op(d, i) for i, d in enumerate(doc["ops"])))
        state = circuit_to_gaussian(source, tol)
    return LoadedState(state, validate_state(state, tol), kind, source)


def parse_state(text: str | bytes | dict, tol: Tolerances = DEFAULT) -> LoadedState:
    """Parse a JSON document (text or already-decoded object)."""
    if isinstance(text, (str, bytes)):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedInputError(f"invalid JSON: {exc}") from None
    else:
        doc = text
    return parse_document(doc, tol)


def load_state(path: str | Path, tol: Tolerances = DEFAULT) -> LoadedState:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise MalformedInputError(f"cannot read {path}: {exc.strerror}") from None
    return parse_state(text, tol)


def _op_document(op) -> dict:
    if isinstance(op, ThermalInit):
        return {"op": "thermal", "mode": op.mode, "mean_photons": op.mean_photons}
    if isinstance(op, Squeeze):
        return {"op": "squeeze", "mode": op.mode, "r": op.r, "phase": op.phase}
    if isinstance(op, Rotate):
        return {"op": "rotate", "mode": op.mode, "angle": op.angle}
    if isinstance(op, BeamSplit):
        return {"op": "beamsplit", "modes": [op.mode_a, op.mode_b], "angle": op.angle, "phase": op.phase}
    return {"op": "displace", "mode": op.mode, "q": op.q, "p": op.p}


def to_document(obj: GaussianState | StandardFormParams | GaussianCircuit | LoadedState, mean=None) -> dict:
    """Serialise a state, standard-form parameter set, circuit or parsed document."""
    if isinstance(obj, LoadedState):
        if obj.kind == "standard-form":
            m = obj.state.mean
            return to_document(obj.source, None if not np.any(m) else m)
        return to_document(obj.source if obj.kind == "circuit" else obj.state)
    if isinstance(obj, GaussianState):
        return {"kind": "gaussian", "n": obj.n, "mean": obj.mean.tolist(), "cov": obj.cov.tolist()}
    if isinstance(obj, StandardFormParams):
        doc = {"kind": "standard-form", "b1": obj.b1, "b2": obj.b2, "c": obj.c, "d": obj.d}
        if mean is not None:
            doc["mean"] = [float(x) for x in mean]
        return doc
    if isinstance(obj, GaussianCircuit):
        return {"kind": "circuit", "n": obj.n, "ops": [_op_document(op) for op in obj.ops]}
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj, **kw) -> str:
    return json.dumps(to_document(obj), **kw)
