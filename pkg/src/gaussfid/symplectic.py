"""Gaussian-state data types, physicality checks and symplectic spectra.

Conventions used everywhere in the package:

* hbar = 1, so the vacuum has quadrature variance 1/2 and every symplectic
  eigenvalue of a physical covariance matrix satisfies kappa >= 1/2.
* Quadratures are interleaved, ``(q1, p1, q2, p2, ..., qn, pn)``, and the
  symplectic form is the direct sum of ``[[0, 1], [-1, 0]]`` blocks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError, MalformedInputError, NotSymplecticError
from .tolerances import DEFAULT, Tolerances

_J1 = np.array([[0.0, 1.0], [-1.0, 0.0]])


def symplectic_form(n: int) -> np.ndarray:
    """Return the ``2n x 2n`` standard symplectic form."""
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise MalformedInputError(f"invalid mode count {n!r}; expected a positive integer")
    return np.kron(np.eye(n), _J1)


def _as_real_array(x, name: str) -> np.ndarray:
    try:
        arr = np.array(x, dtype=float)
    except (TypeError, ValueError) as exc:
        raise MalformedInputError(f"{name} is not numeric: {exc}") from None
    if not np.all(np.isfinite(arr)):
        raise MalformedInputError(f"{name} contains non-finite entries")
    return arr


class GaussianState:
    """Mean quadrature vector and covariance matrix of an n-mode Gaussian state.

    Construction checks shapes, finiteness and symmetry only. A covariance
    whose asymmetry is below ``tol.sym`` is replaced by its symmetric part;
    anything larger is rejected. Physicality is *not* enforced here, use
    :func:`validate_state` (unphysical matrices are legitimate objects to
    diagnose).

    Instances are immutable: the stored arrays are read-only.
    """

    __slots__ = ("mean", "cov")

    def __init__(self, mean, cov, *, tol: Tolerances = DEFAULT):
        cov = _as_real_array(cov, "covariance matrix")
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2 or cov.shape[0] == 0:
            raise DimensionError(f"covariance matrix must be 2n x 2n, got shape {cov.shape}")
        if mean is None:
            mean = np.zeros(cov.shape[0])
        mean = _as_real_array(mean, "mean vector")
        if mean.shape != (cov.shape[0],):
            raise DimensionError(
                f"mean vector has shape {mean.shape}, expected ({cov.shape[0]},)"
            )
        asym = np.max(np.abs(cov - cov.T))
        if asym > tol.sym:
            raise MalformedInputError(
                f"covariance matrix is not symmetric (max |V - V^T| = {asym:.3g} > {tol.sym:g})"
            )
        cov = 0.5 * (cov + cov.T)
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    def __setattr__(self, name, value):
        raise AttributeError("GaussianState is immutable")

    @property
    def n(self) -> int:
        return self.cov.shape[0] // 2

    def __repr__(self) -> str:
        return f"GaussianState(n={self.n}, mean={self.mean.tolist()}, cov={self.cov.tolist()})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, GaussianState):
            return NotImplemented
        return np.array_equal(self.mean, other.mean) and np.array_equal(self.cov, other.cov)

    __hash__ = None

    def isclose(self, other: "GaussianState", atol: float = DEFAULT.sym) -> bool:
        return (
            self.n == other.n
            and np.allclose(self.mean, other.mean, rtol=0, atol=atol)
            and np.allclose(self.cov, other.cov, rtol=0, atol=atol)
        )

    @classmethod
    def vacuum(cls, n: int) -> "GaussianState":
        return cls(np.zeros(2 * n), 0.5 * np.eye(2 * n))

    @classmethod
    def thermal(cls, kappas, mean=None) -> "GaussianState":
        """Product of thermal states with per-mode symplectic eigenvalues ``kappas``."""
        kappas = np.atleast_1d(np.asarray(kappas, dtype=float))
        return cls(mean, np.diag(np.repeat(kappas, 2)))


def two_mode_squeezed_vacuum(r: float) -> GaussianState:
    ch, sh = np.cosh(2 * r) / 2, np.sinh(2 * r) / 2
    return standard_form_state(StandardFormParams(ch, ch, sh, -sh))


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    min_kappa: float
    symmetric: bool
    positive_definite: bool
    uncertainty_ok: bool
    failing: str | None = None
    detail: str = ""


def validate_covariance(cov: np.ndarray, tol: Tolerances = DEFAULT) -> ValidationReport:
    cov = _as_real_array(cov, "covariance matrix")
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2:
        raise DimensionError(f"covariance matrix must be 2n x 2n, got shape {cov.shape}")
    asym = float(np.max(np.abs(cov - cov.T)))
    if asym > tol.sym:
        return ValidationReport(False, float("nan"), False, False, False, "symmetry",
                                f"max |V - V^T| = {asym:.3g}")
    cov = 0.5 * (cov + cov.T)
    eig = np.linalg.eigvalsh(cov)
    if eig[0] <= 0:
        return ValidationReport(False, float("nan"), True, False, False, "positive-definite",
                                f"smallest eigenvalue {eig[0]:.6g}")
    kmin = float(symplectic_eigenvalues(cov, tol)[-1])
    if kmin < 0.5 - tol.phys:
        return ValidationReport(False, kmin, True, True, False, "uncertainty-relation",
                                f"smallest symplectic eigenvalue {kmin:.6g} < 1/2")
    return ValidationReport(True, kmin, True, True, True)


def validate_state(state: GaussianState, tol: Tolerances = DEFAULT) -> ValidationReport:
    return validate_covariance(state.cov, tol)


def symplectic_eigenvalues(cov: np.ndarray, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Symplectic spectrum of a positive-definite covariance matrix, descending.

    The eigenvalues of ``J V`` come in pairs ``+-i kappa``; each kappa is the
    mean of the paired imaginary magnitudes, which keeps degenerate spectra
    well behaved.
    """
    cov = np.asarray(cov, dtype=float)
    n = cov.shape[0] // 2
    try:
        np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        raise DomainError("covariance matrix is not positive definite") from None
    ev = np.linalg.eigvals(symplectic_form(n) @ cov)
    im = np.sort(ev.imag)
    return 0.5 * (im[n:][::-1] - im[:n])


def sqrt_spectrum(kappas, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Symplectic spectrum of the state proportional to the square root of rho."""
    k = np.asarray(kappas, dtype=float)
    if np.any(k < 0.5 - tol.phys):
        raise DomainError(f"symplectic eigenvalues below 1/2: {k[k < 0.5 - tol.phys].tolist()}")
    rad = k * k - 0.25
    rad = np.where(np.abs(rad) <= tol.phys, np.maximum(rad, 0.0), rad)
    return k + np.sqrt(np.maximum(rad, 0.0))


def purity(state: GaussianState) -> float:
    d = np.linalg.det(state.cov)
    if d <= 0:
        raise DomainError("covariance matrix has non-positive determinant")
    return float(2.0 ** (-state.n) / np.sqrt(d))


@dataclass(frozen=True)
class PurityCheck:
    pure: bool
    residual: float

    def __bool__(self) -> bool:
        return self.pure


def is_pure(state: GaussianState, tol: Tolerances = DEFAULT) -> PurityCheck:
    """Matrix purity test ``(J V)^2 = -I/4``.

    The threshold is scaled by the squared magnitude of V so that strongly
    squeezed pure states are not rejected by round-off.
    """
    jv = symplectic_form(state.n) @ state.cov
    residual = float(np.max(np.abs(jv @ jv + 0.25 * np.eye(2 * state.n))))
    scale = max(1.0, float(np.max(np.abs(state.cov))) ** 2)
    return PurityCheck(residual <= tol.pure * scale, residual)


def is_symplectic(S: np.ndarray, tol: Tolerances = DEFAULT) -> bool:
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] % 2:
        return False
    J = symplectic_form(S.shape[0] // 2)
    scale = max(1.0, float(np.max(np.abs(S))) ** 2)
    return bool(np.max(np.abs(S @ J @ S.T - J)) <= tol.symp * scale)


def apply_symplectic(state: GaussianState, S, shift=None, tol: Tolerances = DEFAULT) -> GaussianState:
    """Act with ``V -> S V S^T`` and ``mean -> S mean + shift``."""
    S = _as_real_array(S, "symplectic matrix")
    if S.shape != (2 * state.n, 2 * state.n):
        raise DimensionError(f"symplectic matrix shape {S.shape} does not match n={state.n}")
    if not is_symplectic(S, tol):
        raise NotSymplecticError("matrix does not satisfy S J S^T = J")
    shift = np.zeros(2 * state.n) if shift is None else _as_real_array(shift, "shift")
    if shift.shape != (2 * state.n,):
        raise DimensionError(f"shift has shape {shift.shape}, expected ({2 * state.n},)")
    cov = S @ state.cov @ S.T
    return GaussianState(S @ state.mean + shift, 0.5 * (cov + cov.T), tol=tol)


# Primitive symplectic matrices. Their Fock-space counterparts live in
# gaussfid.fock; agreement between the two is checked through the
# characteristic function, not assumed.

def squeeze_matrix(r: float, phase: float = 0.0) -> np.ndarray:
    """Heisenberg action of exp[(z* a^2 - z a^dag^2)/2], z = r e^{i phase}.

    ``squeeze_matrix(r)`` maps the q variance to ``e^{-2r}`` times its value.
    """
    mu = np.cosh(r)
    nu = -np.exp(1j * phase) * np.sinh(r)
    return _bogoliubov_block(mu, nu)


def rotation_matrix(angle: float) -> np.ndarray:
    """Heisenberg action of exp(-i angle a^dag a)."""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, s], [-s, c]])


def beamsplitter_matrix(angle: float, phase: float = 0.0) -> np.ndarray:
    """Heisenberg action of exp[angle (e^{i phase} a1^dag a2 - e^{-i phase} a1 a2^dag)]."""
    W = np.array([
        [np.cos(angle), np.exp(1j * phase) * np.sin(angle)],
        [-np.exp(-1j * phase) * np.sin(angle), np.cos(angle)],
    ])
    S = np.zeros((4, 4))
    for i in range(2):
        for j in range(2):
            S[2 * i:2 * i + 2, 2 * j:2 * j + 2] = _bogoliubov_block(W[i, j], 0.0)
    return S


def _bogoliubov_block(mu: complex, nu: complex) -> np.ndarray:
    # a -> mu a + nu a^dag written on (q, p) with a = (q + i p)/sqrt(2)
    plus, minus = mu + nu, mu - nu
    return np.array([[plus.real, -minus.imag], [plus.imag, minus.real]])


def embed(S_local: np.ndarray, modes, n: int) -> np.ndarray:
    """Embed a symplectic matrix acting on ``modes`` into ``Sp(2n)``."""
    idx = np.concatenate([[2 * m, 2 * m + 1] for m in modes])
    S = np.eye(2 * n)
    S[np.ix_(idx, idx)] = S_local
    return S


@dataclass(frozen=True)
class StandardFormParams:
    """Two-mode standard form: blocks ``b1 I``, ``b2 I`` and correlations ``diag(c, d)``."""

    b1: float
    b2: float
    c: float
    d: float

    def __post_init__(self):
        vals = np.array([self.b1, self.b2, self.c, self.d], dtype=float)
        if not np.all(np.isfinite(vals)):
            raise MalformedInputError("standard-form parameters must be finite")
        if self.b1 < 0.5 - DEFAULT.phys or self.b2 < 0.5 - DEFAULT.phys:
            raise MalformedInputError(f"standard form needs b1, b2 >= 1/2 (got {self.b1}, {self.b2})")
        if self.c < abs(self.d):
            raise MalformedInputError(f"standard form needs c >= |d| (got c={self.c}, d={self.d})")


def standard_form_cm(p: StandardFormParams) -> np.ndarray:
    """Covariance matrix of a standard-form parameter set.

    The result is not guaranteed to be physical; check it with
    :func:`validate_covariance`.
    """
    return np.array([
        [p.b1, 0.0, p.c, 0.0],
        [0.0, p.b1, 0.0, p.d],
        [p.c, 0.0, p.b2, 0.0],
        [0.0, p.d, 0.0, p.b2],
    ])


def standard_form_state(p: StandardFormParams, mean=None) -> GaussianState:
    return GaussianState(mean, standard_form_cm(p))
