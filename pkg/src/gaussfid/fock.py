"""Truncated Fock-space ground truth for circuit-prepared Gaussian states.

States are built as ``rho = X X^dag``: the columns of X start as the thermal
basis vectors weighted by the square roots of their probabilities, and each
unitary of the circuit acts on X from the left. Unitaries are exact
exponentials (by Hermitian eigendecomposition) of their quadratic generators
written in a working basis that is ``pad`` levels larger than the requested
cutoff, so truncation artefacts at the working edge do not reach the
retained block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg
from scipy import sparse

from .circuit import (
    DEFAULT_LIMITS,
    BeamSplit,
    CircuitLimits,
    Displace,
    GaussianCircuit,
    Rotate,
    Squeeze,
    ThermalInit,
    circuit_to_gaussian,
    marginal_circuit,
)
from .errors import CutoffTooSmallError, MalformedInputError, UnsupportedModeCountError
from .fidelity import fidelity
from .tolerances import DEFAULT, Tolerances

DEFAULT_PAD = {1: 60, 2: 20, 3: 2}
MAX_CUTOFF = {3: 12}
_NEGLIGIBLE_WEIGHT = 1e-30


@dataclass(frozen=True, eq=False)
class FockDensityMatrix:
    n: int
    cutoff: int
    data: np.ndarray
    trace_loss: float = 0.0

    def tensor(self) -> np.ndarray:
        """Data reshaped to ``(D,)*n + (D,)*n`` (row modes, then column modes)."""
        return self.data.reshape((self.cutoff,) * (2 * self.n))

    def photon_distribution(self) -> np.ndarray:
        return np.real(np.diag(self.data)).reshape((self.cutoff,) * self.n)


@lru_cache(maxsize=None)
def _ladder(M: int) -> np.ndarray:
    a = np.diag(np.sqrt(np.arange(1, M, dtype=float)), 1)
    a.setflags(write=False)
    return a


def _quadratures(M: int) -> tuple[np.ndarray, np.ndarray]:
    a = _ladder(M)
    return (a + a.T) / math.sqrt(2), (a - a.T) / (1j * math.sqrt(2))


def expm_hermitian(H: np.ndarray) -> np.ndarray:
    """``exp(-i H)`` for Hermitian H."""
    w, Q = np.linalg.eigh(H)
    return (Q * np.exp(-1j * w)) @ Q.conj().T


def squeeze_unitary(M: int, r: float, phase: float = 0.0) -> np.ndarray:
    a = _ladder(M)
    z = r * np.exp(1j * phase)
    return expm_hermitian(0.5j * (np.conj(z) * (a @ a) - z * (a.T @ a.T)))


def rotation_unitary(M: int, angle: float) -> np.ndarray:
    return np.diag(np.exp(-1j * angle * np.arange(M)))


def displacement_unitary(M: int, q: float, p: float) -> np.ndarray:
    """exp[-i (q p_hat - p q_hat)], shifting the quadrature means by (q, p)."""
    qh, ph = _quadratures(M)
    return expm_hermitian(q * ph - p * qh)


def weyl_unitary(M: int, uq: float, up: float) -> np.ndarray:
    """exp[-i (uq q_hat + up p_hat)], the kernel of the characteristic function."""
    qh, ph = _quadratures(M)
    return expm_hermitian(uq * qh + up * ph)


def beamsplitter_unitary(M: int, angle: float, phase: float = 0.0) -> sparse.csr_matrix:
    """Two-mode beamsplitter on the ``M*M`` product basis (index ``k1*M + k2``).

    The generator conserves total photon number, so it is exponentiated one
    number sector at a time.
    """
    rows, cols, vals = [], [], []
    for N in range(2 * M - 1):
        k = np.arange(max(0, N - M + 1), min(N, M - 1) + 1)
        idx = k * M + (N - k)
        H = np.zeros((k.size, k.size), dtype=complex)
        # a1^dag a2 |k, N-k> = sqrt((k+1)(N-k)) |k+1, N-k-1>
        amp = np.sqrt((k[:-1] + 1.0) * (N - k[:-1]))
        up = 1j * angle * np.exp(1j * phase) * amp
        H[np.arange(1, k.size), np.arange(k.size - 1)] = up
        H[np.arange(k.size - 1), np.arange(1, k.size)] = np.conj(up)
        U = expm_hermitian(H)
        r, c = np.meshgrid(idx, idx, indexing="ij")
        rows.append(r.ravel()); cols.append(c.ravel()); vals.append(U.ravel())
    return sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(M * M, M * M)
    )


def thermal_weights(M: int, mean_photons: float) -> np.ndarray:
    k = np.arange(M)
    if mean_photons == 0:
        return (k == 0).astype(float)
    return mean_photons ** k / (1.0 + mean_photons) ** (k + 1)


def _working_cutoff(c: GaussianCircuit, cutoff: int, pad: int | None) -> int:
    if c.n not in DEFAULT_PAD:
        raise UnsupportedModeCountError(f"Fock oracle supports n <= 3 (got n={c.n})")
    if cutoff < 2:
        raise MalformedInputError(f"cutoff must be >= 2 (got {cutoff})")
    if c.n in MAX_CUTOFF and cutoff > MAX_CUTOFF[c.n]:
        raise UnsupportedModeCountError(
            f"n={c.n} oracle is limited to cutoff <= {MAX_CUTOFF[c.n]} (got {cutoff})"
        )
    return cutoff + (DEFAULT_PAD[c.n] if pad is None else pad)


def _apply_local(X: np.ndarray, U: np.ndarray, mode: int) -> np.ndarray:
    return np.moveaxis(np.tensordot(U, X, axes=(1, mode)), 0, mode)


def _apply_pair(X: np.ndarray, U: sparse.csr_matrix, a: int, b: int) -> np.ndarray:
    Y = np.moveaxis(X, (a, b), (0, 1))
    shape = Y.shape
    Y = U @ Y.reshape(shape[0] * shape[1], -1)
    return np.moveaxis(Y.reshape(shape), (0, 1), (a, b))


def marginal_tails(c: GaussianCircuit, cutoff: int, horizon: int | None = None) -> np.ndarray:
    """Per-mode probabilities ``P(n_j >= D)`` for ``D = 0 .. horizon-1``.

    Row j is the tail function of mode j's photon-number distribution. The
    box trace loss of the joint state is at least the largest entry in the
    column ``cutoff`` and at most the column sum.
    """
    horizon = horizon or max(2 * cutoff, cutoff + 60)
    state = circuit_to_gaussian(c)
    tails = []
    for m in range(c.n):
        X = _build(marginal_circuit(state, m), horizon + 60)
        p = np.sum(np.abs(X[:horizon]) ** 2, axis=1)
        tails.append(np.clip(1.0 - np.concatenate(([0.0], np.cumsum(p)[:-1])), 0.0, 1.0))
    return np.array(tails)


def _suggest_cutoff(c: GaussianCircuit, cutoff: int, budget: float, max_horizon: int = 512) -> int | None:
    """Smallest cutoff whose marginal union bound meets the budget, if one is found."""
    horizon = max(2 * cutoff, cutoff + 60)
    while True:
        ok = np.nonzero(marginal_tails(c, cutoff, horizon).sum(axis=0) <= budget)[0]
        if ok.size:
            return int(ok[0])
        if horizon >= max_horizon:
            return None
        horizon = min(2 * horizon, max_horizon)


def _build(c: GaussianCircuit, M: int) -> np.ndarray:
    """Factor X of the working-basis state, shape ``(M,)*n + (K,)``."""
    n = c.n
    weights = [thermal_weights(M, nb) for nb in c.initial_mean_photons()]
    w = weights[0]
    for wm in weights[1:]:
        w = np.multiply.outer(w, wm)
    w = w.ravel()
    keep = np.nonzero(w > _NEGLIGIBLE_WEIGHT)[0]
    X = np.zeros((M ** n, keep.size), dtype=complex)
    X[keep, np.arange(keep.size)] = np.sqrt(w[keep])
    X = X.reshape((M,) * n + (keep.size,))
    for op in c.ops:
        if isinstance(op, ThermalInit):
            continue
        if isinstance(op, Squeeze):
            X = _apply_local(X, squeeze_unitary(M, op.r, op.phase), op.mode)
        elif isinstance(op, Rotate):
            X = _apply_local(X, rotation_unitary(M, op.angle), op.mode)
        elif isinstance(op, Displace):
            X = _apply_local(X, displacement_unitary(M, op.q, op.p), op.mode)
        elif isinstance(op, BeamSplit):
            X = _apply_pair(X, beamsplitter_unitary(M, op.angle, op.phase), op.mode_a, op.mode_b)
    return X


def circuit_to_fock(
    c: GaussianCircuit,
    cutoff: int,
    *,
    pad: int | None = None,
    trace_loss_budget: float | None = None,
    limits: CircuitLimits | None = DEFAULT_LIMITS,
    tol: Tolerances = DEFAULT,
) -> FockDensityMatrix:
    """Density matrix of a circuit in the Fock basis truncated to ``cutoff`` per mode.

    The retained block is renormalised. If more than ``trace_loss_budget``
    (default ``tol.trunc``) of the probability lies outside it,
    :class:`CutoffTooSmallError` is raised with a suggested cutoff. Pass
    ``limits=None`` to skip the parameter bounds.
    """
    budget = tol.trunc if trace_loss_budget is None else trace_loss_budget
    if limits is not None:
        bad = c.limit_violations(limits)
        if bad:
            raise MalformedInputError("circuit exceeds truncation-safe bounds: " + "; ".join(bad))
    M = _working_cutoff(c, cutoff, pad)

    if budget < 1.0:
        # cheap lower bound on the loss from the one-mode marginals
        tails = marginal_tails(c, cutoff)
        if tails[:, cutoff].max() > budget:
            raise CutoffTooSmallError(
                f"at cutoff {cutoff} at least {tails[:, cutoff].max():.3g} of the probability is "
                f"truncated (budget {budget:g})",
                _suggest_cutoff(c, cutoff, budget),
            )

    X = _build(c, M)
    box = (slice(0, cutoff),) * c.n
    Xd = X[box].reshape(cutoff ** c.n, -1)
    rho = Xd @ Xd.conj().T
    tr = float(np.real(np.trace(rho)))
    loss = 1.0 - tr
    if loss > budget:
        raise CutoffTooSmallError(
            f"trace loss {loss:.3g} at cutoff {cutoff} exceeds budget {budget:g}",
            _suggest_cutoff(c, cutoff, budget),
        )
    rho = rho / tr
    return FockDensityMatrix(c.n, cutoff, 0.5 * (rho + rho.conj().T), max(loss, 0.0))


def _hermitian_sqrt(rho: np.ndarray, tol: Tolerances) -> np.ndarray:
    w, Q = scipy.linalg.eigh(rho, driver="evr")
    if w[0] < -tol.psd:
        raise MalformedInputError(f"density matrix has eigenvalue {w[0]:.3g} < 0")
    return (Q * np.sqrt(np.clip(w, 0.0, None))) @ Q.conj().T


def _check_density(r: FockDensityMatrix, tol: Tolerances) -> None:
    d = r.data
    if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] != r.cutoff ** r.n:
        raise MalformedInputError(f"density matrix shape {d.shape} does not match n={r.n}, D={r.cutoff}")
    if np.max(np.abs(d - d.conj().T)) > tol.sym * max(1.0, float(np.max(np.abs(d)))):
        raise MalformedInputError("density matrix is not Hermitian")
    tr = float(np.real(np.trace(d)))
    if not (1.0 - tol.trunc <= tr <= 1.0 + tol.trunc):
        raise MalformedInputError(f"density matrix trace {tr!r} is not 1")


def fock_fidelity(r1: FockDensityMatrix, r2: FockDensityMatrix, tol: Tolerances = DEFAULT) -> float:
    """Uhlmann fidelity ``[Tr sqrt(sqrt(rho2) rho1 sqrt(rho2))]^2``.

    The inner trace equals the sum of singular values of ``sqrt(rho1) sqrt(rho2)``;
    summing those avoids the square roots of round-off-level eigenvalues of
    ``sqrt(rho2) rho1 sqrt(rho2)``, which would otherwise add ~1e-8 of noise
    for two-mode states.
    """
    if r1.data.shape != r2.data.shape:
        raise MalformedInputError(f"shape mismatch: {r1.data.shape} vs {r2.data.shape}")
    _check_density(r1, tol)
    _check_density(r2, tol)
    s1 = _hermitian_sqrt(r1.data, tol)
    s2 = _hermitian_sqrt(r2.data, tol)
    sv = scipy.linalg.svdvals(s1 @ s2)
    return float(np.sum(sv) ** 2)


def characteristic_function(rho: FockDensityMatrix, u, pad: int = 60) -> complex:
    """``Tr[exp(-i u^T r_hat) rho]`` on the truncated basis.

    In terms of the Weyl displacement ``D(v) = exp[-i(q p_hat - p q_hat)]``
    this is ``Tr[D(J u) rho]``; the kernel is built ``pad`` levels larger and
    cropped.
    """
    u = np.asarray(u, dtype=float)
    D, n = rho.cutoff, rho.n
    Ws = [weyl_unitary(D + pad, u[2 * j], u[2 * j + 1])[:D, :D] for j in range(n)]
    T = rho.tensor()
    letters = "abcdefghijklmnopqrstuvwxyz"
    out_idx, in_idx = letters[:n], letters[n:2 * n]
    # sum over W1[a1,c1] ... Wn[an,cn] rho[c1..cn, a1..an]
    spec = ",".join(f"{out_idx[j]}{in_idx[j]}" for j in range(n)) + f",{in_idx}{out_idx}->"
    return complex(np.einsum(spec, *Ws, T))


def gaussian_characteristic_function(mean, cov, u) -> complex:
    u = np.asarray(u, dtype=float)
    return complex(np.exp(-0.5 * u @ np.asarray(cov) @ u - 1j * np.asarray(mean) @ u))


def cf_check(c: GaussianCircuit, cutoff: int, samples, *, tol: Tolerances = DEFAULT,
             limits: CircuitLimits | None = DEFAULT_LIMITS) -> float:
    """Max |chi_gaussian(u) - chi_fock(u)| over the sample points."""
    state = circuit_to_gaussian(c, tol)
    rho = circuit_to_fock(c, cutoff, tol=tol, limits=limits)
    dev = 0.0
    for u in samples:
        u = np.asarray(u, dtype=float)
        if u.shape != (2 * c.n,):
            raise MalformedInputError(f"sample point has shape {u.shape}, expected ({2 * c.n},)")
        dev = max(dev, abs(gaussian_characteristic_function(state.mean, state.cov, u)
                           - characteristic_function(rho, u)))
    return dev


def random_sample_points(n: int, count: int, rng: np.random.Generator, radius: float = 3.0) -> np.ndarray:
    """Points uniform in the 2n-ball of the given radius."""
    x = rng.normal(size=(count, 2 * n))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    return x * radius * rng.uniform(size=(count, 1)) ** (1.0 / (2 * n))


@dataclass(frozen=True)
class OracleComparison:
    closed_form: float
    oracle: float
    deviation: float
    tolerance: float
    method: str
    cutoff: int

    @property
    def passed(self) -> bool:
        return self.deviation < self.tolerance


def oracle_compare(c1: GaussianCircuit, c2: GaussianCircuit, cutoff: int, *,
                   tol: Tolerances = DEFAULT, limits: CircuitLimits | None = DEFAULT_LIMITS,
                   trace_loss_budget: float | None = None) -> OracleComparison:
    if c1.n != c2.n:
        raise MalformedInputError(f"mode-count mismatch: {c1.n} vs {c2.n}")
    rep = fidelity(circuit_to_gaussian(c1, tol), circuit_to_gaussian(c2, tol), tol)
    kw = dict(tol=tol, limits=limits, trace_loss_budget=trace_loss_budget)
    F = fock_fidelity(circuit_to_fock(c1, cutoff, **kw), circuit_to_fock(c2, cutoff, **kw), tol)
    return OracleComparison(rep.fidelity, F, abs(rep.fidelity - F), tol.oracle(c1.n), rep.method, cutoff)
