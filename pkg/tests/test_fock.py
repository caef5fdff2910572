import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pairmaser import fock as F
from pairmaser.errors import DomainError, TruncationError

G, E = F.ThermalModel.GEOMETRIC, F.ThermalModel.EXPONENTIAL


def test_vacuum():
    v = F.vacuum(4)
    assert v.rho == pytest.approx(np.diag([1, 0, 0, 0]))
    assert F.mean_photon(F.vacuum(8)) == 0
    assert F.von_neumann_entropy(F.vacuum(8)) == 0
    with pytest.raises(DomainError):
        F.vacuum(0)


def test_cavity_state_is_read_only_copy():
    a = np.eye(2) / 2
    s = F.CavityState(a)
    a[0, 0] = 5
    assert s.rho[0, 0] == 0.5
    with pytest.raises(ValueError):
        s.rho[0, 0] = 1
    with pytest.raises(DomainError):
        F.CavityState(np.ones((2, 3)))


def test_mean_photon_examples():
    assert F.mean_photon(F.diagonal_state([0, 1])) == 1
    assert F.mean_photon(F.thermal_state(0.75, 200)) == pytest.approx(0.75, abs=1e-8)


def test_entropy_examples():
    assert F.von_neumann_entropy(F.diagonal_state([0.5, 0.5])) == pytest.approx(1.0)
    assert F.von_neumann_entropy(F.thermal_state(1.0, 200)) == pytest.approx(2.0, abs=1e-6)
    # a pure superposition has zero entropy even though it is not diagonal
    psi = np.array([1, 1j, 0]) / np.sqrt(2)
    assert F.von_neumann_entropy(F.CavityState(np.outer(psi, psi.conj()))) == pytest.approx(0, abs=1e-12)


def test_thermal_state_models():
    for model in (G, E):
        assert F.thermal_state(0.0, 5, model).rho == pytest.approx(F.vacuum(5).rho)
    ex = F.thermal_state(1.0, 200, E)
    assert F.mean_photon(ex) == pytest.approx(1 / (np.e - 1), abs=1e-6)
    assert F.mean_photon(ex) == pytest.approx(0.581977, abs=1e-6)
    p = F.thermal_populations(2.0, 200, G)
    m = np.arange(5)
    assert p[:5] == pytest.approx(2.0 ** m / 3.0 ** (m + 1), rel=1e-12)


def test_thermal_state_errors():
    with pytest.raises(DomainError):
        F.thermal_state(-0.1, 10)
    with pytest.raises(TruncationError):
        F.thermal_state(5.0, 10)
    assert F.thermal_dim(5.0, G) > 10


def test_thermal_entropy_of_mean():
    assert F.thermal_entropy_of_mean(0) == 0
    assert F.thermal_entropy_of_mean(1) == pytest.approx(2.0)
    s = F.von_neumann_entropy(F.thermal_state(0.75, 200, G))
    assert F.thermal_entropy_of_mean(0.75) == pytest.approx(s, abs=1e-6)
    with pytest.raises(DomainError):
        F.thermal_entropy_of_mean(-1)


@pytest.mark.parametrize("nbar", [0.1, 0.5, 1, 2, 5])
def test_thermal_entropy_closed_form_matches_state(nbar):
    state = F.thermal_state(nbar, F.thermal_dim(nbar, G, 1e-14))
    assert F.thermal_entropy_of_mean(nbar) == pytest.approx(F.von_neumann_entropy(state), abs=1e-6)


def test_thermal_entropy_increasing():
    n = np.linspace(0.01, 20, 400)
    s = np.array([F.thermal_entropy_of_mean(x) for x in n])
    assert np.all(np.diff(s) > 0)


@pytest.mark.parametrize("nbar", [0.3, 1.0, 2.5])
def test_entropy_difference_thermal_input_is_zero(nbar):
    state = F.thermal_state(nbar, F.thermal_dim(nbar, G, 1e-14), G)
    assert F.entropy_difference(state, G) == pytest.approx(0, abs=1e-9)


def test_exponential_reference_can_exceed_state_entropy():
    # the exponential reference at the same parameter has a lower mean, so
    # even a geometric thermal state beats it
    s = F.thermal_state(1.0, 200, G)
    assert F.entropy_difference(s, E) > 0
    assert F.entropy_difference(s, G) == pytest.approx(0, abs=1e-9)


def test_entropy_difference_geometric_never_positive(rng):
    for dim in (2, 5, 12):
        for _ in range(20):
            s = F.random_cavity_state(rng, dim, rank=rng.integers(1, dim + 1))
            assert F.entropy_difference(s, G) <= 1e-9


def test_offdiag_norm():
    assert F.offdiag_norm(F.vacuum(3)) == 0
    assert F.offdiag_norm(F.thermal_state(1.0, 100)) == 0
    rho = np.array([[0.5, 0.2j], [-0.2j, 0.5]])
    assert F.offdiag_norm(F.CavityState(rho)) == pytest.approx(0.4)


def test_resize_examples():
    assert F.resize(F.vacuum(2), 10).rho == pytest.approx(F.vacuum(10).rho)
    pops = np.zeros(10)
    pops[0], pops[9] = 0.9, 0.1
    with pytest.raises(TruncationError):
        F.resize(F.diagonal_state(pops), 5)
    s = F.thermal_state(0.5, 40)
    back = F.resize(F.resize(s, 60), 40)
    assert np.array_equal(back.rho, s.rho)


def test_resize_keeps_observables(rng):
    s = F.random_cavity_state(rng, 6)
    big = F.resize(s, 15)
    assert F.mean_photon(big) == pytest.approx(F.mean_photon(s), abs=1e-14)
    assert F.von_neumann_entropy(big) == pytest.approx(F.von_neumann_entropy(s), abs=1e-12)


def test_random_cavity_state_is_physical(rng):
    s = F.random_cavity_state(rng, 7, rank=3)
    assert s.trace_error() < 1e-12
    assert s.hermiticity_error() < 1e-12
    assert s.min_eigenvalue() > -1e-12
    assert np.linalg.matrix_rank(s.rho, tol=1e-10) == 3


@given(st.lists(st.floats(0, 1), min_size=1, max_size=12).filter(lambda p: sum(p) > 1e-3))
def test_entropy_bounds_on_diagonal_states(p):
    p = np.array(p) / sum(p)
    s = F.von_neumann_entropy(F.diagonal_state(p))
    assert -1e-12 <= s <= np.log2(len(p)) + 1e-9
