"""Random symplectic matrices, states and circuits for tests and benchmarks."""

from __future__ import annotations

import numpy as np

from .circuit import BeamSplit, Displace, GaussianCircuit, Rotate, Squeeze, ThermalInit
from .symplectic import (
    GaussianState,
    StandardFormParams,
    beamsplitter_matrix,
    embed,
    rotation_matrix,
    squeeze_matrix,
    standard_form_cm,
    validate_covariance,
)


def random_symplectic(n: int, rng: np.random.Generator, max_squeeze: float = 0.8) -> np.ndarray:
    """Product of random rotations, squeezers and beamsplitters (two layers)."""
    S = np.eye(2 * n)
    for _ in range(2):
        for m in range(n):
            S = embed(rotation_matrix(rng.uniform(0, 2 * np.pi)), [m], n) @ S
            S = embed(squeeze_matrix(rng.uniform(-max_squeeze, max_squeeze), rng.uniform(0, 2 * np.pi)), [m], n) @ S
        for m in range(n - 1):
            bs = beamsplitter_matrix(rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi))
            S = embed(bs, [m, m + 1], n) @ S
    return S


def random_state(n: int, rng: np.random.Generator, *, max_photons: float = 2.0,
                 max_squeeze: float = 0.8, max_shift: float = 1.0, pure: bool = False) -> GaussianState:
    """``S diag(kappa) S^T`` with random thermal spectrum and random mean."""
    kappas = np.full(n, 0.5) if pure else 0.5 + rng.uniform(0, max_photons, size=n)
    S = random_symplectic(n, rng, max_squeeze)
    cov = S @ np.diag(np.repeat(kappas, 2)) @ S.T
    return GaussianState(rng.uniform(-max_shift, max_shift, size=2 * n), 0.5 * (cov + cov.T))


def random_standard_form(rng: np.random.Generator, max_b: float = 3.0) -> StandardFormParams:
    """Random physical standard-form parameters.

    ``c`` and ``d`` are drawn inside the region where the covariance matrix
    obeys the uncertainty relation; rejection keeps the distribution simple.
    """
    while True:
        b1, b2 = 0.5 + rng.uniform(0, max_b - 0.5, size=2)
        cmax = np.sqrt(b1 * b2)
        c = rng.uniform(0, cmax)
        d = rng.uniform(-c, c)
        p = StandardFormParams(float(b1), float(b2), float(c), float(d))
        if validate_covariance(standard_form_cm(p)).valid:
            return p


def random_circuit(n: int, rng: np.random.Generator, *, max_photons: float = 2.0,
                   max_squeeze: float = 0.8, max_displacement: float = 2.0) -> GaussianCircuit:
    """Thermal inputs, per-mode squeeze and rotation, one beamsplitter (n = 2), displacements."""
    ops: list = [ThermalInit(m, float(rng.uniform(0, max_photons))) for m in range(n)]
    for m in range(n):
        ops.append(Squeeze(m, float(rng.uniform(0, max_squeeze)), float(rng.uniform(0, 2 * np.pi))))
    if n == 2:
        ops.append(BeamSplit(0, 1, float(rng.uniform(0, np.pi)), float(rng.uniform(0, 2 * np.pi))))
    for m in range(n):
        ops.append(Rotate(m, float(rng.uniform(0, 2 * np.pi))))
        q, p = rng.uniform(-max_displacement, max_displacement, size=2)
        ops.append(Displace(m, float(q), float(p)))
    return GaussianCircuit(n, tuple(ops))
