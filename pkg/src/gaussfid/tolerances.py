"""Numerical tolerance profiles shared by every module."""

from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    sym: float = 1e-10      # covariance symmetry, absolute on the max entry
    phys: float = 1e-9      # slack on the kappa >= 1/2 bound
    det: float = 1e-9       # relative determinant / spectrum checks
    pure: float = 1e-9      # ||(JV)^2 + I/4||_max
    symp: float = 1e-9      # S J S^T = J
    clamp: float = 1e-9     # invariant bounds (relative, absolute at 0)
    fid: float = 1e-9       # fidelity <= 1 + fid
    cross: float = 1e-8     # formula-vs-formula agreement
    psd: float = 1e-10      # negative eigenvalue slack of Fock density matrices
    trunc: float = 1e-8     # trace-loss budget of truncated Fock states
    oracle_single: float = 1e-6  # closed form vs Fock oracle, one mode
    oracle_multi: float = 1e-4   # truncated multimode square roots accumulate more error

    def oracle(self, n_modes: int) -> float:
        return self.oracle_single if n_modes == 1 else self.oracle_multi

    def scaled(self, factor: float) -> "Tolerances":
        return replace(self, **{f.name: getattr(self, f.name) * factor for f in fields(self)})


DEFAULT = Tolerances()
STRICT = DEFAULT.scaled(0.1)

PROFILES = {"default": DEFAULT, "strict": STRICT}
