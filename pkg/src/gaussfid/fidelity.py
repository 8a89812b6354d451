"""Closed-form Uhlmann fidelity between Gaussian states.

The fidelity factorises into the Hilbert-Schmidt overlap ``Tr(rho' rho'')``
and a factor fixed by the symplectic spectrum of an auxiliary Gaussian state
rho_B. For one and two modes that spectrum is determined by three
determinant invariants of the pair (Delta, Gamma, Lambda); for commuting
states it follows mode by mode from the two input spectra.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DimensionError,
    DomainError,
    NumericalInconsistencyError,
    UnphysicalStateError,
    UnsupportedModeCountError,
)
from .symplectic import (
    GaussianState,
    StandardFormParams,
    is_pure,
    symplectic_form,
    validate_state,
)
from .tolerances import DEFAULT, Tolerances

METHODS = ("one-mode", "two-mode", "commuting", "pure-shortcut")


@dataclass(frozen=True)
class ComplexGaussianKernel:
    """Weight function ``f(u) = exp(log_norm) exp(-u^T F u / 2 - i xi^T u)``."""

    F: np.ndarray
    xi: np.ndarray
    log_norm: float

    @property
    def n(self) -> int:
        return self.F.shape[0] // 2

    def __call__(self, u) -> complex:
        u = np.asarray(u, dtype=float)
        return complex(np.exp(self.log_norm - 0.5 * u @ self.F @ u - 1j * self.xi @ u))


@dataclass(frozen=True)
class InvariantTriple:
    delta: float
    gamma: float
    lam: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.delta, self.gamma, self.lam)


@dataclass(frozen=True)
class FidelityReport:
    fidelity: float
    overlap: float
    displacement_factor: float
    bures_distance: float
    method: str
    invariants: InvariantTriple | None = None

    def as_dict(self) -> dict:
        d = {
            "fidelity": self.fidelity,
            "overlap": self.overlap,
            "displacement_factor": self.displacement_factor,
            "bures_distance": self.bures_distance,
            "method": self.method,
        }
        if self.invariants is not None:
            d.update(delta=self.invariants.delta, gamma=self.invariants.gamma,
                     lambda_=self.invariants.lam)
        return d


def _check_pair(s1: GaussianState, s2: GaussianState, tol: Tolerances) -> None:
    if s1.n != s2.n:
        raise DimensionError(f"mode-count mismatch: {s1.n} vs {s2.n}")
    for label, s in (("first", s1), ("second", s2)):
        rep = validate_state(s, tol)
        if not rep.valid:
            raise UnphysicalStateError(f"{label} state is unphysical ({rep.failing}: {rep.detail})")


def _quadratic_displacement(s1, s2) -> tuple[np.ndarray, float]:
    vsum = s1.cov + s2.cov
    du = s1.mean - s2.mean
    return vsum, float(du @ np.linalg.solve(vsum, du))


def displacement_factor(s1: GaussianState, s2: GaussianState) -> float:
    _, quad = _quadratic_displacement(s1, s2)
    return float(np.exp(-0.5 * quad))


def overlap(s1: GaussianState, s2: GaussianState, tol: Tolerances = DEFAULT) -> float:
    """Hilbert-Schmidt overlap ``Tr(rho' rho'')``."""
    _check_pair(s1, s2, tol)
    vsum, quad = _quadratic_displacement(s1, s2)
    return float(np.exp(-0.5 * quad) / np.sqrt(np.linalg.det(vsum)))


def product_kernel(s1: GaussianState, s2: GaussianState, tol: Tolerances = DEFAULT) -> ComplexGaussianKernel:
    """Gaussian weight function of the (non-Hermitian) product ``rho' rho''``."""
    _check_pair(s1, s2, tol)
    n = s1.n
    half_iJ = 0.5j * symplectic_form(n)
    vsum = s1.cov + s2.cov
    try:
        inv = np.linalg.inv(vsum)
    except np.linalg.LinAlgError:
        raise NumericalInconsistencyError("V' + V'' is singular") from None
    F = -half_iJ + (s2.cov + half_iJ) @ inv @ (s1.cov + half_iJ)
    asym = np.max(np.abs(F - F.T))
    if asym > tol.sym * max(1.0, float(np.max(np.abs(F)))):
        raise NumericalInconsistencyError(f"product kernel is not symmetric ({asym:.3g})")
    F = 0.5 * (F + F.T)
    xi = s1.mean - (s1.cov - half_iJ) @ inv @ (s1.mean - s2.mean)
    return ComplexGaussianKernel(F, xi, float(np.log(overlap(s1, s2, tol))))


def _det_plus_half_iJ(cov: np.ndarray, tol: Tolerances) -> float:
    """Real determinant of the Hermitian matrix ``V + (i/2) J``."""
    n = cov.shape[0] // 2
    d = np.linalg.det(cov + 0.5j * symplectic_form(n))
    if abs(d.imag) > tol.det * max(1.0, abs(np.linalg.det(cov))):
        raise NumericalInconsistencyError(f"det(V + iJ/2) has imaginary residue {d.imag:.3g}")
    return float(d.real)


def _raw_invariants(s1: GaussianState, s2: GaussianState, tol: Tolerances) -> InvariantTriple:
    n = s1.n
    J = symplectic_form(n)
    scale = 4.0 ** n
    delta = float(np.linalg.det(s1.cov + s2.cov))
    gamma = scale * float(np.linalg.det(J @ s1.cov @ J @ s2.cov - 0.25 * np.eye(2 * n)))
    lam = scale * _det_plus_half_iJ(s1.cov, tol) * _det_plus_half_iJ(s2.cov, tol)

    if delta < 1.0:
        if 1.0 - delta > tol.clamp:
            raise NumericalInconsistencyError(f"Delta = {delta!r} < 1")
        delta = 1.0
    if gamma < delta:
        if delta - gamma > tol.clamp * delta:
            raise NumericalInconsistencyError(f"Gamma = {gamma!r} < Delta = {delta!r}")
        gamma = delta
    if lam < 0.0:
        # Lambda vanishes when either state is pure; its round-off is set by
        # the size of the two determinants, not by an absolute scale.
        lam_scale = max(1.0, scale * np.linalg.det(s1.cov) * np.linalg.det(s2.cov))
        if -lam > tol.clamp * lam_scale:
            raise NumericalInconsistencyError(f"Lambda = {lam!r} < 0")
        lam = 0.0
    return InvariantTriple(delta, gamma, lam)


def invariant_triple(s1: GaussianState, s2: GaussianState, tol: Tolerances = DEFAULT) -> InvariantTriple:
    """Determinant invariants Delta, Gamma, Lambda of a one- or two-mode pair."""
    _check_pair(s1, s2, tol)
    if s1.n not in (1, 2):
        raise UnsupportedModeCountError(
            f"invariant triple determines the fidelity only for n <= 2 (got n={s1.n})"
        )
    return _raw_invariants(s1, s2, tol)


def invariants_standard_form(p1: StandardFormParams, p2: StandardFormParams) -> InvariantTriple:
    """Factored Delta, Gamma, Lambda for two undisplaced standard-form states."""
    B1, B2 = p1.b1 + p2.b1, p1.b2 + p2.b2
    delta = (B1 * B2 - (p1.c + p2.c) ** 2) * (B1 * B2 - (p1.d + p2.d) ** 2)
    bb = p1.b1 * p2.b1 + p1.b2 * p2.b2
    gamma = 16.0 * (
        (p1.b1 * p1.b2 - p1.d ** 2) * (p2.b1 * p2.b2 - p2.c ** 2) + 0.25 * (bb + 2 * p1.d * p2.c) + 1 / 16
    ) * (
        (p1.b1 * p1.b2 - p1.c ** 2) * (p2.b1 * p2.b2 - p2.d ** 2) + 0.25 * (bb + 2 * p1.c * p2.d) + 1 / 16
    )

    def symplectic_det(p):
        det = (p.b1 * p.b2 - p.c ** 2) * (p.b1 * p.b2 - p.d ** 2)
        return det - 0.25 * (p.b1 ** 2 + p.b2 ** 2 + 2 * p.c * p.d) + 1 / 16

    lam = 16.0 * symplectic_det(p1) * symplectic_det(p2)
    return InvariantTriple(float(delta), float(gamma), float(lam))


def bures_distance(fidelity: float | FidelityReport) -> float:
    F = fidelity.fidelity if isinstance(fidelity, FidelityReport) else float(fidelity)
    return float(np.sqrt(max(0.0, 2.0 - 2.0 * np.sqrt(min(F, 1.0)))))


def _check_upper_bound(F: float, tol: Tolerances) -> float:
    if not np.isfinite(F) or F > 1.0 + tol.fid:
        raise NumericalInconsistencyError(f"fidelity {F!r} exceeds 1")
    return F


def _report(F, ov, disp, method, triple, tol) -> FidelityReport:
    F = _check_upper_bound(float(F), tol)
    return FidelityReport(F, float(ov), float(disp), bures_distance(F), method, triple)


def fidelity_one_mode(s1: GaussianState, s2: GaussianState, tol: Tolerances = DEFAULT) -> FidelityReport:
    if s1.n != 1 or s2.n != 1:
        raise DimensionError(f"one-mode formula needs n=1 states (got {s1.n}, {s2.n})")
    t = invariant_triple(s1, s2, tol)
    disp = displacement_factor(s1, s2)
    # rationalised form of disp / (sqrt(Delta + Lambda) - sqrt(Lambda))
    F = disp * (np.sqrt(t.delta + t.lam) + np.sqrt(t.lam)) / t.delta
    return _report(F, disp / np.sqrt(t.delta), disp, "one-mode", t, tol)


def fidelity_two_mode(s1: GaussianState, s2: GaussianState, tol: Tolerances = DEFAULT) -> FidelityReport:
    if s1.n != 2 or s2.n != 2:
        raise DimensionError(f"two-mode formula needs n=2 states (got {s1.n}, {s2.n})")
    t = invariant_triple(s1, s2, tol)
    disp = displacement_factor(s1, s2)
    s = np.sqrt(t.gamma) + np.sqrt(t.lam)
    rad = s * s - t.delta
    if rad < 0.0:
        if -rad > tol.clamp * s * s:
            raise NumericalInconsistencyError(
                f"negative radicand {rad!r} in the two-mode formula; inputs are inconsistent"
            )
        rad = 0.0
    # rationalised form of disp / (s - sqrt(s^2 - Delta))
    F = disp * (s + np.sqrt(rad)) / t.delta
    return _report(F, disp / np.sqrt(t.delta), disp, "two-mode", t, tol)


def commuting_kappa_b(k1: Sequence[float], k2: Sequence[float]) -> np.ndarray:
    """Spectrum of rho_B for commuting states, mode by mode."""
    a, b = np.asarray(k1, dtype=float), np.asarray(k2, dtype=float)
    if a.shape != b.shape:
        raise DimensionError(f"spectra have different lengths: {a.size} vs {b.size}")
    return (a * b + 0.25) / (a + b)


def fidelity_commuting(k1: Sequence[float], k2: Sequence[float], disp: float = 1.0,
                       tol: Tolerances = DEFAULT) -> float:
    """Fidelity of commuting states from spectra paired along shared eigenvectors.

    The caller is responsible for the pairing: ``k1[j]`` and ``k2[j]`` must
    belong to the same common symplectic eigenmode.
    """
    a, b = np.asarray(k1, dtype=float), np.asarray(k2, dtype=float)
    if a.shape != b.shape:
        raise DimensionError(f"spectra have different lengths: {a.size} vs {b.size}")
    if np.any(a < 0.5 - tol.phys) or np.any(b < 0.5 - tol.phys):
        raise DomainError("symplectic eigenvalues below 1/2")
    ra = np.maximum(a * a - 0.25, 0.0)
    rb = np.maximum(b * b - 0.25, 0.0)
    per_mode = 2.0 / (a + b) ** 2 * (a * b + 0.25 + np.sqrt(ra * rb))
    return float(disp * np.prod(per_mode))


def _williamson_diagonal_kappas(s: GaussianState, tol: Tolerances) -> np.ndarray | None:
    """Per-mode kappas if the CM is diagonal with equal q/p variances, else None."""
    v = s.cov
    scale = max(1.0, float(np.max(np.abs(v))))
    if np.max(np.abs(v - np.diag(np.diag(v)))) > tol.sym * scale:
        return None
    d = np.diag(v)
    q, p = d[0::2], d[1::2]
    if np.max(np.abs(q - p)) > tol.sym * scale:
        return None
    return 0.5 * (q + p)


def fidelity(s1: GaussianState, s2: GaussianState, tol: Tolerances = DEFAULT) -> FidelityReport:
    """Fidelity with automatic choice of the evaluation path.

    Order: a pure input reduces the fidelity to the overlap; otherwise one-
    and two-mode pairs use the invariant formulas; larger pairs are handled
    only when both covariance matrices are diagonal in the given basis with
    equal q/p variances per mode (a shared Williamson frame).
    """
    _check_pair(s1, s2, tol)
    n = s1.n
    triple = invariant_triple(s1, s2, tol) if n <= 2 else None
    if is_pure(s1, tol) or is_pure(s2, tol):
        ov = overlap(s1, s2, tol)
        return _report(ov, ov, displacement_factor(s1, s2), "pure-shortcut", triple, tol)
    if n == 1:
        return fidelity_one_mode(s1, s2, tol)
    if n == 2:
        return fidelity_two_mode(s1, s2, tol)
    k1 = _williamson_diagonal_kappas(s1, tol)
    k2 = _williamson_diagonal_kappas(s2, tol)
    if k1 is None or k2 is None:
        raise UnsupportedModeCountError(
            f"no closed form for a mixed, non-commuting pair of {n}-mode states; "
            "supported: n <= 2, a pure input, or both states in a shared diagonal frame"
        )
    disp = displacement_factor(s1, s2)
    F = fidelity_commuting(k1, k2, disp, tol)
    return _report(F, overlap(s1, s2, tol), disp, "commuting", None, tol)


def sqrt_state_kappas(s1: GaussianState, s2: GaussianState, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Symplectic spectrum of rho_B reconstructed from the invariant triple (n <= 2)."""
    t = invariant_triple(s1, s2, tol)
    n = s1.n
    g = t.gamma / (4.0 ** n * t.delta)     # det V_B
    l = t.lam / (4.0 ** n * t.delta)       # det(V_B + iJ/2)
    if n == 1:
        return np.array([np.sqrt(g)])
    # squares are the roots of x^2 - S x + g with S fixed by the two determinants
    S = 4.0 * (g - l) + 0.25
    disc = max(S * S - 4.0 * g, 0.0)
    x = np.array([(S + np.sqrt(disc)) / 2, (S - np.sqrt(disc)) / 2])
    return np.sqrt(np.maximum(x, 0.25))


@dataclass(frozen=True)
class DetIdentityCheck:
    """Determinant identities for V_B, checked against the product kernel.

    ``det_vb`` and ``det_vb_plus`` are the values reconstructed from the
    invariant triple; the residuals compare them with the determinants of
    the product kernel computed directly.
    """

    det_vb: float
    det_vb_plus: float
    det_residual: float
    plus_residual: float
    n: int

    @property
    def residuals(self) -> tuple[float, float]:
        return (self.det_residual, self.plus_residual)

    @property
    def purity_margin(self) -> float:
        """``det V_B - 4^{-n}``: non-negative, zero iff rho_B is pure."""
        return self.det_vb - 4.0 ** (-self.n)


def det_identities_check(s1: GaussianState, s2: GaussianState, tol: Tolerances = DEFAULT) -> DetIdentityCheck:
    _check_pair(s1, s2, tol)
    n = s1.n
    t = _raw_invariants(s1, s2, tol)
    det_vb = t.gamma / (4.0 ** n * t.delta)
    det_vb_plus = t.lam / (4.0 ** n * t.delta)
    K = product_kernel(s1, s2, tol)
    det_f = np.linalg.det(K.F)
    det_f_plus = np.linalg.det(K.F + 0.5j * symplectic_form(n))
    return DetIdentityCheck(
        det_vb=det_vb,
        det_vb_plus=det_vb_plus,
        det_residual=float(abs(det_f - det_vb) / det_vb),
        plus_residual=float(abs(det_f_plus - det_vb_plus) / det_vb),
        n=n,
    )
