"""Gaussian circuits: a small state-preparation language with two semantics.

A circuit starts from a product of thermal states (vacuum where no
``ThermalInit`` is given) and applies squeezers, phase rotations,
beamsplitters and displacements. :func:`circuit_to_gaussian` gives the
phase-space semantics; :func:`gaussfid.fock.circuit_to_fock` gives the
Fock-space one.

Displacements are in quadrature units: ``Displace(mode, q, p)`` shifts the
mean by ``(q, p)``, i.e. coherent amplitude ``alpha = (q + i p) / sqrt(2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DimensionError, MalformedInputError
from .symplectic import (
    GaussianState,
    apply_symplectic,
    beamsplitter_matrix,
    embed,
    rotation_matrix,
    squeeze_matrix,
)
from .tolerances import DEFAULT, Tolerances


@dataclass(frozen=True)
class ThermalInit:
    mode: int
    mean_photons: float


@dataclass(frozen=True)
class Squeeze:
    mode: int
    r: float
    phase: float = 0.0


@dataclass(frozen=True)
class Rotate:
    mode: int
    angle: float


@dataclass(frozen=True)
class BeamSplit:
    mode_a: int
    mode_b: int
    angle: float
    phase: float = 0.0


@dataclass(frozen=True)
class Displace:
    mode: int
    q: float
    p: float


Op = Union[ThermalInit, Squeeze, Rotate, BeamSplit, Displace]


@dataclass(frozen=True)
class CircuitLimits:
    """Parameter bounds that keep truncated Fock representations accurate."""

    max_squeeze: float = 1.0
    max_mean_photons: float = 3.0
    max_displacement: float = 2.5
    max_mix_angle: float = math.pi


DEFAULT_LIMITS = CircuitLimits()


def _modes(op: Op) -> tuple[int, ...]:
    return (op.mode_a, op.mode_b) if isinstance(op, BeamSplit) else (op.mode,)


def _params(op: Op) -> list[float]:
    return [v for k, v in vars(op).items() if not k.startswith("mode")]


@dataclass(frozen=True)
class GaussianCircuit:
    n: int
    ops: tuple[Op, ...] = ()

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise MalformedInputError(f"invalid mode count {self.n!r}")
        object.__setattr__(self, "ops", tuple(self.ops))
        thermal_seen: set[int] = set()
        touched: set[int] = set()
        for i, op in enumerate(self.ops):
            if not isinstance(op, (ThermalInit, Squeeze, Rotate, BeamSplit, Displace)):
                raise MalformedInputError(f"op {i}: unknown operation {op!r}")
            modes = _modes(op)
            for m in modes:
                if isinstance(m, bool) or not isinstance(m, (int, np.integer)) or not 0 <= m < self.n:
                    raise DimensionError(f"op {i}: mode index {m!r} out of range for n={self.n}")
            if isinstance(op, BeamSplit) and op.mode_a == op.mode_b:
                raise MalformedInputError(f"op {i}: beamsplitter needs two distinct modes")
            if not all(math.isfinite(v) for v in _params(op)):
                raise MalformedInputError(f"op {i}: non-finite parameter in {op!r}")
            if isinstance(op, ThermalInit):
                if op.mean_photons < 0:
                    raise MalformedInputError(f"op {i}: negative mean photon number")
                if op.mode in thermal_seen:
                    raise MalformedInputError(f"op {i}: second ThermalInit on mode {op.mode}")
                if op.mode in touched:
                    raise MalformedInputError(
                        f"op {i}: ThermalInit on mode {op.mode} after a unitary acted on it"
                    )
                thermal_seen.add(op.mode)
            else:
                touched.update(modes)

    def limit_violations(self, limits: CircuitLimits = DEFAULT_LIMITS) -> list[str]:
        out = []
        for i, op in enumerate(self.ops):
            if isinstance(op, ThermalInit) and op.mean_photons > limits.max_mean_photons:
                out.append(f"op {i}: mean_photons {op.mean_photons} > {limits.max_mean_photons}")
            elif isinstance(op, Squeeze) and abs(op.r) > limits.max_squeeze:
                out.append(f"op {i}: |r| = {abs(op.r)} > {limits.max_squeeze}")
            elif isinstance(op, BeamSplit) and abs(op.angle) > limits.max_mix_angle:
                out.append(f"op {i}: |angle| = {abs(op.angle)} > {limits.max_mix_angle}")
            elif isinstance(op, Displace) and max(abs(op.q), abs(op.p)) > limits.max_displacement:
                out.append(f"op {i}: displacement ({op.q}, {op.p}) exceeds {limits.max_displacement}")
        return out

    def initial_mean_photons(self) -> list[float]:
        nbar = [0.0] * self.n
        for op in self.ops:
            if isinstance(op, ThermalInit):
                nbar[op.mode] = float(op.mean_photons)
        return nbar


def symplectic_of(op: Op, n: int) -> np.ndarray:
    if isinstance(op, Squeeze):
        return embed(squeeze_matrix(op.r, op.phase), [op.mode], n)
    if isinstance(op, Rotate):
        return embed(rotation_matrix(op.angle), [op.mode], n)
    if isinstance(op, BeamSplit):
        return embed(beamsplitter_matrix(op.angle, op.phase), [op.mode_a, op.mode_b], n)
    raise TypeError(f"{type(op).__name__} has no symplectic matrix")


def circuit_to_gaussian(c: GaussianCircuit, tol: Tolerances = DEFAULT) -> GaussianState:
    kappas = np.array(c.initial_mean_photons()) + 0.5
    state = GaussianState.thermal(kappas)
    for op in c.ops:
        if isinstance(op, ThermalInit):
            continue
        if isinstance(op, Displace):
            shift = np.zeros(2 * c.n)
            shift[2 * op.mode:2 * op.mode + 2] = (op.q, op.p)
            state = GaussianState(state.mean + shift, state.cov, tol=tol)
        else:
            state = apply_symplectic(state, symplectic_of(op, c.n), tol=tol)
    return state


def marginal_circuit(state: GaussianState, mode: int) -> GaussianCircuit:
    """One-mode circuit preparing the reduced state of ``mode``.

    Every one-mode Gaussian state is a displaced, rotated, squeezed thermal
    state; this is used to bound photon-number tails, not for synthesis of
    multimode states.
    """
    sl = slice(2 * mode, 2 * mode + 2)
    V = state.cov[sl, sl]
    d = state.mean[sl]
    kappa = math.sqrt(max(np.linalg.det(V), 0.25))
    w, O = np.linalg.eigh(V / kappa)
    if np.linalg.det(O) < 0:
        O[:, 1] *= -1
    r = 0.25 * math.log(max(w[1], 1.0) / max(w[0], 1e-300))
    angle = math.atan2(O[0, 1], O[0, 0])
    return GaussianCircuit(1, (
        ThermalInit(0, kappa - 0.5),
        Squeeze(0, r),
        Rotate(0, angle),
        Displace(0, float(d[0]), float(d[1])),
    ))
