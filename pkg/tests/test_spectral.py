import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from topoqubits import lattice_models as lm, spectral
from topoqubits.errors import InsufficientSupportError, NoEdgeModeError, NotHermitianError

from oracles import semi_infinite_edge

positive = st.floats(0.01, 2.0, allow_nan=False)


def _ssh(L=7, a=0.1, b=1.0, omega=0.0):
    return spectral.eigh_tridiagonal(lm.build_ssh(lm.ChainSpec(L=L, a=a, b=b, omega=omega)))


@given(st.integers(1, 12), positive)
def test_uniform_chain_closed_form(L, t):
    n = 2 * L
    es = spectral.eigh_tridiagonal(lm.build_ssh(lm.ChainSpec(L=L, a=t, b=t)))
    k = np.arange(1, n + 1)
    exact = np.sort(2 * t * np.cos(k * np.pi / (n + 1)))
    np.testing.assert_allclose(es.values, exact, atol=1e-12)


@given(st.integers(1, 10), positive, positive, st.floats(-1, 1), st.floats(-1, 1))
def test_eigensystem_residual_and_orthonormality(L, a, b, omega, u):
    h = lm.build_rice_mele(lm.ChainSpec(L=L, a=a, b=b, omega=omega, u=u))
    es = spectral.eigh_tridiagonal(h)
    assert es.residual(h) < 1e-12
    assert es.orthonormality_error() < 1e-12
    assert np.all(np.diff(es.values) >= 0)


@given(st.integers(1, 10), positive, positive, st.floats(-3, 3))
def test_chiral_pairing(L, a, b, omega):
    es = _ssh(L, a, b, omega)
    assert spectral.chiral_pairing_error(es.values, omega) < 1e-10


@given(st.integers(2, 10), positive, positive, st.floats(0.05, 1.0))
def test_rice_mele_levels_inside_bulk_bands(L, a, b, u):
    # the finite open chain never leaves the infinite-chain band envelope
    es = spectral.eigh_tridiagonal(lm.build_rice_mele(lm.ChainSpec(L=L, a=a, b=b, u=u)))
    top = math.sqrt(u * u + (a + b) ** 2)
    assert np.all(np.abs(es.values) <= top + 1e-12)
    assert np.all(np.abs(es.values) >= u - 1e-12)


def test_dense_matches_tridiagonal():
    h = lm.build_rice_mele(lm.ChainSpec(L=5, a=0.4, b=1.0, u=0.3))
    es_d = spectral.eigh_dense_hermitian(lm.DenseOperator(h.to_dense()))
    np.testing.assert_allclose(es_d.values, spectral.eigh_tridiagonal(h).values, atol=1e-12)
    low = spectral.eigh_dense_hermitian(lm.DenseOperator(h.to_dense()), n_lowest=3)
    np.testing.assert_allclose(low.values, es_d.values[:3], atol=1e-12)


def test_dense_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        spectral.eigh_dense_hermitian(lm.DenseOperator(np.array([[0, 1.0], [0.0, 0]])))


def test_sign_convention_first_component_positive():
    es = _ssh(5, 0.7, 1.0)
    for v in es.vectors.T:
        first = v[np.flatnonzero(np.abs(v) > 1e-12)[0]]
        assert first > 0


def test_edge_modes_against_semi_infinite_oracle():
    rep = spectral.find_edge_modes(_ssh(), a=0.1, b=1.0)
    assert rep.indices == (6, 7)
    ref = semi_infinite_edge(14, 0.1, 1.0)
    np.testing.assert_allclose(rep.left_state, ref, atol=1e-6)
    np.testing.assert_allclose(rep.right_state, ref[::-1], atol=1e-6)
    assert rep.splitting < 1e-6
    assert rep.xi_theory == pytest.approx(1 / math.log(10))
    assert rep.xi_fit == pytest.approx(rep.xi_theory, rel=1e-3)


def test_edge_states_orthonormal_and_sublattice_polarized():
    rep = spectral.find_edge_modes(_ssh(a=0.4), a=0.4, b=1.0)
    L, R = rep.left_state, rep.right_state
    assert abs(np.vdot(L, R)) < 1e-12
    assert np.linalg.norm(L) == pytest.approx(1.0)
    assert np.sum(np.abs(L[1::2]) ** 2) < 1e-20
    assert np.sum(np.abs(R[0::2]) ** 2) < 1e-20
    assert L[0] > 0 and R[-1] > 0


def test_trivial_phase_has_no_edge_modes():
    with pytest.raises(NoEdgeModeError):
        spectral.find_edge_modes(_ssh(a=1.5), a=1.5, b=1.0)


def test_gap_closing_has_no_window():
    with pytest.raises(NoEdgeModeError):
        spectral.find_edge_modes(_ssh(a=1.0), a=1.0, b=1.0)


def test_decoupled_limit():
    rep = spectral.find_edge_modes(_ssh(a=0.0), a=0.0, b=1.0)
    assert rep.xi_theory == 0.0
    assert math.isnan(rep.xi_fit)
    np.testing.assert_allclose(np.abs(rep.left_state[0]), 1.0)


def test_omega_shift_moves_window():
    rep = spectral.find_edge_modes(_ssh(omega=5.0), 5.0, a=0.1, b=1.0)
    assert rep.indices == (6, 7)


@given(st.floats(0.05, 0.6))
def test_localization_fit_recovers_synthetic_decay(xi):
    m = np.arange(7)
    s = np.zeros(14)
    s[0::2] = np.exp(-m / xi)
    s /= np.linalg.norm(s)
    got, r2 = spectral.localization_length_fit(s, support_tol=1e-300)
    assert got == pytest.approx(xi, rel=1e-9)
    assert r2 == pytest.approx(1.0)


def test_localization_fit_needs_support():
    s = np.zeros(14)
    s[0] = 1.0
    with pytest.raises(InsufficientSupportError):
        spectral.localization_length_fit(s)


def test_profiles():
    s = np.zeros(4)
    s[2] = 1.0
    np.testing.assert_array_equal(spectral.sigma_z_profile(s), [-1, -1, 1, -1])
    assert spectral.ipr(s) == 1.0
    assert spectral.center_of_mass(s) == 3.0
    u = np.full(4, 0.5)
    assert spectral.ipr(u) == pytest.approx(0.25)
    assert spectral.center_of_mass(u) == pytest.approx(2.5)


def test_bulk_state_spreads():
    es = _ssh(a=1.0)
    assert np.all(np.abs(es.vectors[:, 3]) > 1e-3)
