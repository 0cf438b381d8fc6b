import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from topoqubits import lattice_models as lm
from topoqubits.errors import InvalidSpecError, SizeLimitError

from oracles import kron_chain, ssh_tridiagonal_loop

coupling = st.floats(0.0, 3.0, allow_nan=False)
positive = st.floats(0.05, 3.0, allow_nan=False)


def test_ssh_bond_pattern_example():
    h = lm.build_ssh(lm.ChainSpec(L=2, a=0.1, b=1.0, omega=0.5))
    np.testing.assert_array_equal(h.offdiag, [0.1, 1.0, 0.1])
    np.testing.assert_array_equal(h.diag, [0.5] * 4)


def test_rice_mele_staggering():
    h = lm.build_rice_mele(lm.ChainSpec(L=2, a=1, b=1, omega=2, u=0.3))
    np.testing.assert_allclose(h.diag, [2.3, 1.7, 2.3, 1.7])


def test_ssh_rejects_staggering():
    with pytest.raises(InvalidSpecError):
        lm.build_ssh(lm.ChainSpec(L=3, a=0.1, u=0.2))


@pytest.mark.parametrize("kw", [dict(L=0, a=1), dict(L=3, a=-0.1), dict(L=3, a=1, b=0),
                                dict(L=3, a=float("nan")), dict(L=2.5, a=1)])
def test_chainspec_validation(kw):
    with pytest.raises(InvalidSpecError):
        lm.ChainSpec(**kw)


@given(st.integers(1, 8), coupling, positive, st.floats(-2, 2), st.floats(-2, 2))
def test_builder_matches_loop(L, a, b, omega, u):
    h = lm.build_rice_mele(lm.ChainSpec(L=L, a=a, b=b, omega=omega, u=u))
    np.testing.assert_array_equal(h.to_dense(), ssh_tridiagonal_loop(2 * L, a, b, omega, u))


@given(st.integers(1, 8), coupling, positive, st.floats(-1, 1))
def test_matvec_matches_dense(L, a, b, u):
    h = lm.build_rice_mele(lm.ChainSpec(L=L, a=a, b=b, u=u))
    psi = np.exp(1j * np.arange(2 * L)) / np.sqrt(2 * L)
    np.testing.assert_allclose(h.matvec(psi), h.to_dense() @ psi, atol=1e-14)


def test_tridiagonal_is_immutable():
    h = lm.build_ssh(lm.ChainSpec(L=2, a=0.5))
    with pytest.raises(ValueError):
        h.diag[0] = 3.0


def test_aah_modulation():
    alpha = (np.sqrt(5) - 1) / 2
    h = lm.build_aah(5, 1.0, 2.0, alpha, 0.3)
    j = np.arange(1, 6)
    np.testing.assert_allclose(h.diag, 2.0 * np.cos(2 * np.pi * alpha * j + 0.3))
    np.testing.assert_array_equal(h.offdiag, np.ones(4))


def test_full_chain_matches_kron_oracle():
    spec = lm.ChainSpec(L=2, a=0.3, b=0.8, omega=0.7, u=0.2)
    full = lm.build_full_chain(spec).entries
    onsite = [0.9, 0.5, 0.9, 0.5]
    np.testing.assert_allclose(full, kron_chain(onsite, [0.3, 0.8, 0.3]).real, atol=1e-14)


@pytest.mark.parametrize("L", [2, 3])
def test_single_excitation_block_over_grid(L):
    grid = (0.0, 0.1, 0.5, 1.0)
    idx = lm.single_excitation_indices(L)
    N = lm.excitation_number_operator(L).entries
    for a, b, omega, u in itertools.product(grid, grid, grid, grid):
        if b == 0:
            continue  # b > 0 is required by ChainSpec
        spec = lm.ChainSpec(L=L, a=a, b=b, omega=omega, u=u)
        H = lm.build_full_chain(spec).entries
        block = H[np.ix_(idx, idx)]
        assert np.max(np.abs(block - lm.build_rice_mele(spec).to_dense())) <= 1e-14
        assert np.max(np.abs(H @ N - N @ H)) <= 1e-12


def test_full_chain_size_limit():
    with pytest.raises(SizeLimitError):
        lm.build_full_chain(lm.ChainSpec(L=7, a=0.1))


def test_disorder_reproducible_and_seed_sensitive():
    d = lm.DisorderSpec.uniform(0.01, seed=4)
    a1, b1 = lm.draw_disorder(14, d)
    a2, b2 = lm.draw_disorder(14, d)
    np.testing.assert_array_equal(a1, a2)
    np.testing.assert_array_equal(b1, b2)
    a3, _ = lm.draw_disorder(14, lm.DisorderSpec.uniform(0.01, seed=5))
    assert not np.array_equal(a1, a3)


def test_disorder_onsite_independent_of_coupling_sigma():
    d1, _ = lm.draw_disorder(10, lm.DisorderSpec(0.0, 0.02, seed=1))
    d2, _ = lm.draw_disorder(10, lm.DisorderSpec(0.5, 0.02, seed=1))
    np.testing.assert_array_equal(d1, d2)


def test_box_muller_statistics():
    z = lm.gaussian_draws(np.random.default_rng(0), 200_001)
    assert abs(z.mean()) < 0.01
    assert abs(z.std() - 1.0) < 0.01
    # fourth moment of a standard normal is 3
    assert abs(np.mean(z**4) - 3.0) < 0.05


def test_disorder_scale():
    draws = np.concatenate([
        np.concatenate(lm.draw_disorder(14, lm.DisorderSpec.uniform(0.01, seed=s)))
        for s in range(400)
    ])
    assert abs(draws.std() - 0.01) < 5e-4


def test_clean_disorder_is_identity():
    h = lm.build_ssh(lm.ChainSpec(L=3, a=0.2))
    assert lm.apply_disorder(h, lm.DisorderSpec()) == h


def test_dense_operator_hermiticity():
    m = np.array([[1, 1j], [-1j, 2]])
    assert lm.DenseOperator(m).is_hermitian()
    assert not lm.DenseOperator(np.array([[1, 1], [0, 1]])).is_hermitian()
    with pytest.raises(InvalidSpecError):
        lm.DenseOperator(np.zeros((2, 3)))
