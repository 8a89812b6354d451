import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gaussfid.errors import DimensionError, DomainError, MalformedInputError, NotSymplecticError
from gaussfid.sampling import random_state, random_symplectic
from gaussfid.symplectic import (
    GaussianState,
    StandardFormParams,
    apply_symplectic,
    beamsplitter_matrix,
    embed,
    is_pure,
    is_symplectic,
    purity,
    rotation_matrix,
    sqrt_spectrum,
    squeeze_matrix,
    standard_form_cm,
    standard_form_state,
    symplectic_eigenvalues,
    symplectic_form,
    two_mode_squeezed_vacuum,
    validate_covariance,
    validate_state,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_symplectic_form_is_antisymmetric_and_squares_to_minus_one():
    J = symplectic_form(3)
    assert np.array_equal(J, -J.T)
    assert np.array_equal(J @ J, -np.eye(6))


# --- GaussianState ---------------------------------------------------------

def test_vacuum_and_thermal_constructors():
    v = GaussianState.vacuum(2)
    assert np.array_equal(v.cov, 0.5 * np.eye(4))
    assert np.array_equal(v.mean, np.zeros(4))
    t = GaussianState.thermal([1.5, 0.75])
    assert np.allclose(np.diag(t.cov), [1.5, 1.5, 0.75, 0.75])


def test_state_is_immutable():
    s = GaussianState.vacuum(1)
    with pytest.raises(AttributeError):
        s.cov = np.eye(2)
    with pytest.raises(ValueError):
        s.cov[0, 0] = 3.0


def test_small_asymmetry_is_symmetrised():
    cov = np.array([[1.0, 1e-12], [0.0, 1.0]])
    s = GaussianState(None, cov)
    assert s.cov[0, 1] == s.cov[1, 0] == 5e-13


def test_large_asymmetry_is_rejected():
    with pytest.raises(MalformedInputError):
        GaussianState(None, [[1.0, 1e-3], [0.0, 1.0]])


@pytest.mark.parametrize("mean, cov", [
    ([0.0, 0.0, 0.0], np.eye(2)),
    (None, np.eye(3)),
    (None, np.ones((2, 3))),
])
def test_shape_errors(mean, cov):
    with pytest.raises(DimensionError):
        GaussianState(mean, cov)


def test_non_finite_entries_rejected():
    with pytest.raises(MalformedInputError):
        GaussianState([np.nan, 0.0], np.eye(2))
    with pytest.raises(MalformedInputError):
        GaussianState(None, [[np.inf, 0.0], [0.0, 1.0]])


# --- spectrum and validation -----------------------------------------------

def test_vacuum_spectrum():
    assert symplectic_eigenvalues(0.5 * np.eye(2)) == pytest.approx([0.5], abs=1e-15)


def test_standard_form_example_spectrum():
    # b = 1, c = -d = 1/2: kappa^2 = b^2 - c^2 = 3/4 for both modes
    k = symplectic_eigenvalues(standard_form_cm(StandardFormParams(1, 1, 0.5, -0.5)))
    assert k == pytest.approx([math.sqrt(0.75)] * 2, abs=1e-14)


def test_invalid_standard_form_is_flagged():
    cm = standard_form_cm(StandardFormParams(1, 1, 0.9, -0.9))
    rep = validate_covariance(cm)
    assert not rep.valid
    assert rep.failing == "uncertainty-relation"
    assert rep.min_kappa == pytest.approx(math.sqrt(1 - 0.81), abs=1e-12)
    assert symplectic_eigenvalues(cm) == pytest.approx([0.43589] * 2, abs=1e-5)


def test_non_positive_definite_is_flagged_and_spectrum_refuses():
    cm = standard_form_cm(StandardFormParams(1, 1, 1.0, 0.0))
    rep = validate_covariance(cm)
    assert not rep.valid and rep.failing == "positive-definite"
    with pytest.raises(DomainError):
        symplectic_eigenvalues(cm)


def test_validate_asymmetric_matrix_reports_symmetry():
    rep = validate_covariance(np.array([[1.0, 0.1], [0.0, 1.0]]))
    assert not rep.valid and rep.failing == "symmetry"


def test_tmsv_spectrum_is_vacuum():
    s = two_mode_squeezed_vacuum(0.7)
    assert symplectic_eigenvalues(s.cov) == pytest.approx([0.5, 0.5], abs=1e-12)
    assert is_pure(s)


@given(seeds, st.integers(1, 3))
def test_spectrum_is_symplectically_invariant(seed, n):
    rng = np.random.default_rng(seed)
    kappas = np.sort(0.5 + rng.uniform(0, 2, n))[::-1]
    S = random_symplectic(n, rng)
    cov = S @ np.diag(np.repeat(kappas, 2)) @ S.T
    assert symplectic_eigenvalues(cov) == pytest.approx(kappas, rel=1e-9)


@given(seeds, st.integers(1, 3))
def test_random_states_are_valid(seed, n):
    s = random_state(n, np.random.default_rng(seed))
    rep = validate_state(s)
    assert rep.valid and rep.min_kappa >= 0.5


# --- sqrt spectrum and purity -------------------------------------------------

def test_sqrt_spectrum_values():
    assert sqrt_spectrum([0.5]) == pytest.approx([0.5])
    assert sqrt_spectrum([1.5]) == pytest.approx([1.5 + math.sqrt(2.0)])
    with pytest.raises(DomainError):
        sqrt_spectrum([0.4])


def test_purity_of_thermal_state():
    # Tr rho^2 = sum p_k^2 for geometric p_k with nbar = 1: 1/(2 nbar + 1)
    assert purity(GaussianState.thermal([1.5])) == pytest.approx(1 / 3, abs=1e-15)
    assert purity(GaussianState.vacuum(3)) == pytest.approx(1.0, abs=1e-15)


def test_purity_check_residuals():
    assert is_pure(GaussianState.vacuum(1)).residual == 0.0
    chk = is_pure(GaussianState.thermal([1.5]))
    assert not chk and chk.residual == pytest.approx(2.0)


@given(seeds, st.integers(1, 3))
def test_pure_states_pass_matrix_purity_test(seed, n):
    s = random_state(n, np.random.default_rng(seed), pure=True)
    assert is_pure(s)
    assert purity(s) == pytest.approx(1.0, abs=1e-9)


# --- symplectic matrices -----------------------------------------------------

@pytest.mark.parametrize("S", [
    squeeze_matrix(0.7),
    squeeze_matrix(0.4, 1.3),
    rotation_matrix(0.9),
    beamsplitter_matrix(0.6, 0.2),
    embed(beamsplitter_matrix(0.3), [2, 0], 3),
])
def test_primitives_are_symplectic(S):
    assert is_symplectic(S)


def test_squeeze_direction():
    S = squeeze_matrix(0.5)
    assert S == pytest.approx(np.diag([math.exp(-0.5), math.exp(0.5)]))


def test_beamsplitter_mixes_modes():
    S = beamsplitter_matrix(math.pi / 2)
    v = apply_symplectic(GaussianState.thermal([0.5, 1.5]), S)
    assert np.diag(v.cov) == pytest.approx([1.5, 1.5, 0.5, 0.5])


def test_apply_symplectic_rejects_non_symplectic():
    with pytest.raises(NotSymplecticError):
        apply_symplectic(GaussianState.vacuum(1), np.diag([2.0, 2.0]))
    with pytest.raises(DimensionError):
        apply_symplectic(GaussianState.vacuum(1), np.eye(4))


def test_is_symplectic_rejects_bad_shapes():
    assert not is_symplectic(np.eye(3))
    assert not is_symplectic(np.ones((2, 3)))


# --- standard form --------------------------------------------------------

def test_standard_form_layout():
    cm = standard_form_cm(StandardFormParams(2, 1, 0.5, -0.25))
    expected = np.array([[2, 0, 0.5, 0], [0, 2, 0, -0.25], [0.5, 0, 1, 0], [0, -0.25, 0, 1]])
    assert np.array_equal(cm, expected)
    s = standard_form_state(StandardFormParams(2, 1, 0.5, -0.25), [1, 2, 3, 4])
    assert np.array_equal(s.mean, [1, 2, 3, 4])


@pytest.mark.parametrize("args", [(0.4, 1, 0, 0), (1, 1, 0.1, 0.2), (1, 1, np.nan, 0)])
def test_standard_form_parameter_checks(args):
    with pytest.raises(MalformedInputError):
        StandardFormParams(*args)
