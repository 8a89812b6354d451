"""Fidelity between Gaussian states of bosonic modes.

Phase-space conventions: quadratures ordered ``(q1, p1, q2, p2, ...)``,
hbar = 1, vacuum covariance ``I/2``.
"""

from .circuit import (
    BeamSplit,
    CircuitLimits,
    Displace,
    GaussianCircuit,
    Rotate,
    Squeeze,
    ThermalInit,
    circuit_to_gaussian,
)
from .documents import LoadedState, load_state, parse_state, to_document
from .errors import (
    CutoffTooSmallError,
    DimensionError,
    DomainError,
    GaussfidError,
    MalformedInputError,
    NotSymplecticError,
    NumericalInconsistencyError,
    UnphysicalStateError,
    UnsupportedModeCountError,
)
from .fidelity import (
    FidelityReport,
    InvariantTriple,
    bures_distance,
    fidelity,
    fidelity_commuting,
    fidelity_one_mode,
    fidelity_two_mode,
    invariant_triple,
    overlap,
)
from .fock import circuit_to_fock, fock_fidelity, oracle_compare
from .symplectic import (
    GaussianState,
    StandardFormParams,
    is_pure,
    purity,
    standard_form_state,
    symplectic_eigenvalues,
    two_mode_squeezed_vacuum,
    validate_state,
)
from .tolerances import DEFAULT, STRICT, Tolerances

__version__ = "0.1.0"
