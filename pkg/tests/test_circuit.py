import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from topoqubits import circuit
from topoqubits.circuit import CircuitParams
from topoqubits.errors import InvalidSpecError

from oracles import charge_hamiltonian_loop

FIG7 = CircuitParams.fig7(0.2)


def test_fig7_defaults():
    assert FIG7.f_sigma == pytest.approx(10.0)
    assert FIG7.E_C == pytest.approx(0.02)
    assert FIG7.dim == 31 * 31


@pytest.mark.parametrize("kw", [dict(E_J=0), dict(alpha=0), dict(beta=1.0), dict(N_charge=3),
                                dict(f_eps=float("inf"))])
def test_params_validation(kw):
    with pytest.raises(InvalidSpecError):
        CircuitParams(**kw)


@given(st.floats(0.0, 0.5), st.floats(-0.05, 0.05), st.floats(0.2, 0.8))
@settings(max_examples=20)
def test_hamiltonian_matches_loop_oracle(f_alpha, f_eps, alpha):
    p = CircuitParams(alpha=alpha, f_alpha=f_alpha, f_eps=f_eps, f_sigma=50 * f_alpha, N_charge=4)
    H = circuit.build_charge_hamiltonian(p).entries
    ref = charge_hamiltonian_loop(p.E_J, p.E_C, p.alpha, p.loop_phase_A, p.loop_phase_B, 4)
    assert np.max(np.abs(H - ref)) < 1e-14
    assert circuit.build_charge_hamiltonian(p).is_hermitian()


@pytest.mark.parametrize("f_eps", [0.0, 0.003, -0.007])
def test_derivative_matches_central_difference(f_eps):
    p = FIG7.with_flux(f_eps=f_eps)
    h = 1e-5
    num = (circuit.build_charge_hamiltonian(p.with_flux(f_eps=f_eps + h)).entries
           - circuit.build_charge_hamiltonian(p.with_flux(f_eps=f_eps - h)).entries) / (2 * h)
    assert np.max(np.abs(circuit.d_hamiltonian_d_feps(p).entries - num)) < 1e-8


def test_sparse_matches_dense():
    p = FIG7.with_flux(f_eps=0.004)
    s = circuit.lowest_levels(p, 6, "sparse")
    d = circuit.lowest_levels(p, 6, "dense")
    np.testing.assert_allclose(s.values, d.values, atol=1e-11)
    for k in range(2):
        assert abs(abs(np.vdot(s.vectors[:, k], d.vectors[:, k])) - 1) < 1e-9


def test_unknown_solver():
    with pytest.raises(InvalidSpecError):
        circuit.lowest_levels(FIG7, 2, "lanczos")


def test_spectrum_even_in_feps():
    a = circuit.qubit_spectrum(FIG7.with_flux(f_eps=0.006))
    b = circuit.qubit_spectrum(FIG7.with_flux(f_eps=-0.006))
    np.testing.assert_allclose(a, b, atol=1e-11)


def test_spectrum_periodic_in_feps():
    a = circuit.qubit_spectrum(FIG7.with_flux(f_eps=0.004))
    b = circuit.qubit_spectrum(FIG7.with_flux(f_eps=2.004))
    np.testing.assert_allclose(a, b, atol=1e-10)


def test_cutoff_converged():
    a = circuit.qubit_spectrum(FIG7)
    b = circuit.qubit_spectrum(CircuitParams.fig7(0.2, N_charge=18))
    np.testing.assert_allclose(a, b, atol=1e-8)


def test_optimal_point_values():
    rep = circuit.coupling_elements(FIG7)
    # frozen derived values at the Fig. 7 point
    assert rep.g_perp == pytest.approx(1.83882, abs=1e-4)
    assert max(abs(rep.g_par), abs(rep.I_0), abs(rep.I_1)) < 1e-8


def test_coupling_symmetry_in_feps():
    a = circuit.coupling_elements(FIG7.with_flux(f_eps=0.002))
    b = circuit.coupling_elements(FIG7.with_flux(f_eps=-0.002))
    assert a.g_perp == pytest.approx(b.g_perp, abs=1e-9)
    assert a.g_par == pytest.approx(-b.g_par, abs=1e-9)
    assert a.g_perp >= 0


def test_real_gauge_is_real_function():
    es = circuit.lowest_levels(FIG7.with_flux(f_eps=0.003), 2)
    m = 2 * FIG7.N_charge + 1
    for k in range(2):
        c = circuit.real_gauge(es.vectors[:, k] * np.exp(0.7j), FIG7.N_charge).reshape(m, m)
        np.testing.assert_allclose(c[::-1, ::-1], c.conj(), atol=1e-10)


def test_gap_tunable_with_falpha():
    gaps = circuit.gap_vs_falpha(FIG7, [0.0, 0.25, 0.5])
    assert gaps.max() / gaps.min() > 10


def test_two_level_reduction():
    red0 = circuit.two_level_reduction(FIG7)
    assert red0.omega == red0.delta
    assert red0.eps_bias == 0.0
    assert red0.I_p == pytest.approx(1.8332, rel=1e-3)
    red = circuit.two_level_reduction(FIG7.with_flux(f_eps=0.001))
    assert red.eps_bias == pytest.approx(2 * red0.I_p * 0.001, rel=1e-2)
    assert math.hypot(red.eps_bias, red.delta) == pytest.approx(red.omega)


def test_chain_mapping():
    g = circuit.coupling_elements(FIG7).g_perp
    assert circuit.chain_coupling_strength(FIG7, FIG7, 0.01) == pytest.approx(0.01 * g * g)
    spec = circuit.chain_spec_from_circuit(FIG7, 7, 0.001, 0.01)
    assert spec.a / spec.b == pytest.approx(0.1)
    assert spec.omega == pytest.approx(0.014982, abs=1e-5)


def test_feps_sweep_shapes():
    levels, reports = circuit.feps_sweep(FIG7, np.linspace(-0.01, 0.01, 5), 4)
    assert levels.shape == (5, 4)
    assert len(reports) == 5
    assert np.all(np.diff(levels, axis=1) >= 0)
