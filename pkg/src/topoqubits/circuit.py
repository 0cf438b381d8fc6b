"""Gap-tunable flux qubit in the two-junction charge basis.

With the fluxoid constraints eliminating the SQUID phases, the qubit
Hamiltonian in the Cooper-pair numbers ``(n1, n2)`` of the two large junctions is

    4 E_C / (1 + 4 alpha) [(1 + 2 alpha) n1^2 - 4 alpha n1 n2 + (1 + 2 alpha) n2^2]
    + E_J [2 (1 + alpha) - cos phi1 - cos phi2 - 2 alpha cos(A) cos(phi1 + phi2 + B)]

with ``A = pi [beta (N - f_sigma) + f_alpha]`` and ``B = pi (n - f_eps)``.  Wave
functions are expanded as ``sum_{k,l} c_kl exp(-i (k phi1 + l phi2))`` with
``k, l`` in ``[-N_charge, N_charge]``; hops leaving that box are dropped.

All fluxes are reduced (flux quantum absorbed); currents are energies per unit
reduced flux.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (
    DegenerateLevelsError,
    InconsistentDoubletError,
    InvalidSpecError,
    NonConvergenceError,
)
from .lattice_models import ChainSpec, DenseOperator
from .spectral import EigenSystem, eigh_dense_hermitian

SOLVERS = ("sparse", "dense")

FIG7_SIGMA_RATIO = 50.0


@dataclass(frozen=True)
class CircuitParams:
    E_J: float = 1.0
    ratio_EJ_EC: float = 50.0
    alpha: float = 0.5
    beta: float = 0.05
    f_alpha: float = 0.2
    f_eps: float = 0.0
    f_sigma: float = FIG7_SIGMA_RATIO * 0.2
    N_fluxoid: int = 1
    n_fluxoid: int = 1
    N_charge: int = 15

    def __post_init__(self):
        if not self.E_J > 0:
            raise InvalidSpecError("E_J must be > 0")
        if not self.ratio_EJ_EC > 0:
            raise InvalidSpecError("ratio_EJ_EC must be > 0")
        if not self.alpha > 0:
            raise InvalidSpecError("alpha must be > 0")
        if not 0 < self.beta < 1:
            raise InvalidSpecError("beta must lie in (0, 1)")
        if int(self.N_charge) != self.N_charge or self.N_charge < 4:
            raise InvalidSpecError("N_charge must be an integer >= 4")
        for name in ("f_alpha", "f_eps", "f_sigma"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidSpecError(f"{name} must be finite")

    @classmethod
    def fig7(cls, f_alpha: float = 0.2, **overrides) -> "CircuitParams":
        """Parameter set with the total flux tied as f_sigma = 50 f_alpha."""
        return cls(f_alpha=f_alpha, f_sigma=FIG7_SIGMA_RATIO * f_alpha, **overrides)

    def with_flux(self, *, f_alpha: float | None = None, f_eps: float | None = None,
                  tie_sigma: bool = False) -> "CircuitParams":
        fa = self.f_alpha if f_alpha is None else f_alpha
        kw = {"f_alpha": fa}
        if f_eps is not None:
            kw["f_eps"] = f_eps
        if tie_sigma:
            kw["f_sigma"] = FIG7_SIGMA_RATIO * fa
        return replace(self, **kw)

    @property
    def E_C(self) -> float:
        return self.E_J / self.ratio_EJ_EC

    @property
    def loop_phase_A(self) -> float:
        return math.pi * (self.beta * (self.N_fluxoid - self.f_sigma) + self.f_alpha)

    @property
    def loop_phase_B(self) -> float:
        return math.pi * (self.n_fluxoid - self.f_eps)

    @property
    def dim(self) -> int:
        return (2 * self.N_charge + 1) ** 2


@dataclass(frozen=True, eq=False)
class ChargeBasisHamiltonian(DenseOperator):
    """Operator on the charge lattice; row ``(k + Nc) * (2 Nc + 1) + (l + Nc)``."""

    N_charge: int = 0

    def charge_states(self) -> tuple[np.ndarray, np.ndarray]:
        return _charge_grid(self.N_charge)


@dataclass(frozen=True)
class QubitReduction:
    omega: float
    delta: float
    eps_bias: float
    I_p: float


@dataclass(frozen=True)
class CouplingReport:
    g_perp: float
    g_par: float
    I_0: float
    I_1: float


def _charge_grid(Nc: int) -> tuple[np.ndarray, np.ndarray]:
    ks = np.arange(-Nc, Nc + 1)
    k1, k2 = np.meshgrid(ks, ks, indexing="ij")
    return k1.ravel(), k2.ravel()


def _hops(Nc: int, d1: int, d2: int) -> tuple[np.ndarray, np.ndarray]:
    """(source, target) flat indices for (k, l) -> (k + d1, l + d2) inside the box."""
    k1, k2 = _charge_grid(Nc)
    m = 2 * Nc + 1
    ok = (np.abs(k1 + d1) <= Nc) & (np.abs(k2 + d2) <= Nc)
    src = np.flatnonzero(ok)
    return src, src + d1 * m + d2


def build_charge_hamiltonian(p: CircuitParams) -> ChargeBasisHamiltonian:
    Nc = p.N_charge
    k1, k2 = _charge_grid(Nc)
    a = p.alpha
    H = np.zeros((p.dim, p.dim), dtype=complex)
    kinetic = 4.0 * p.E_C / (1.0 + 4.0 * a) * (
        (1 + 2 * a) * k1**2 - 4 * a * k1 * k2 + (1 + 2 * a) * k2**2
    )
    H[np.arange(p.dim), np.arange(p.dim)] = kinetic + 2.0 * (1.0 + a) * p.E_J
    for d1, d2 in ((1, 0), (0, 1)):
        s, t = _hops(Nc, d1, d2)
        H[t, s] = H[s, t] = -p.E_J / 2.0
    # exp(+i(phi1 + phi2)) lowers both charges: (k, l) -> (k - 1, l - 1)
    amp = -a * p.E_J * math.cos(p.loop_phase_A)
    s, t = _hops(Nc, -1, -1)
    H[t, s] = amp * np.exp(1j * p.loop_phase_B)
    H[s, t] = amp * np.exp(-1j * p.loop_phase_B)
    return ChargeBasisHamiltonian(H, N_charge=Nc)


def d_hamiltonian_d_feps(p: CircuitParams) -> ChargeBasisHamiltonian:
    """Analytic derivative at fixed f_sigma: ``-2 pi alpha E_J cos(A) sin(phi1 + phi2 + B)``."""
    Nc = p.N_charge
    D = np.zeros((p.dim, p.dim), dtype=complex)
    amp = -_alpha_amplitude(p)
    s, t = _hops(Nc, -1, -1)
    # d/df_eps of amp exp(+-iB) with dB/df_eps = -pi
    D[t, s] = amp * (-1j * math.pi) * np.exp(1j * p.loop_phase_B)
    D[s, t] = amp * (1j * math.pi) * np.exp(-1j * p.loop_phase_B)
    return ChargeBasisHamiltonian(D, N_charge=Nc)


def _alpha_amplitude(p: CircuitParams) -> float:
    return p.alpha * p.E_J * math.cos(p.loop_phase_A)


def lowest_levels(p: CircuitParams, n_levels: int, solver: str = "sparse") -> EigenSystem:
    """Bottom ``n_levels`` eigenpairs of the charge-basis Hamiltonian.

    ``sparse`` uses shift-invert Lanczos below a Gershgorin bound with a fixed
    start vector (bitwise reproducible); ``dense`` diagonalizes the full matrix.
    """
    H = build_charge_hamiltonian(p)
    if solver == "dense":
        return eigh_dense_hermitian(H, n_lowest=n_levels)
    if solver != "sparse":
        raise InvalidSpecError(f"unknown solver {solver!r}; choose from {SOLVERS}")
    A = H.entries
    radius = np.sum(np.abs(A), axis=1) - np.abs(np.diag(A))
    shift = float(np.min(np.diag(A).real - radius)) - 0.1 * p.E_J
    try:
        w, v = spla.eigsh(
            sp.csc_matrix(A), k=n_levels, sigma=shift, which="LM",
            v0=np.ones(p.dim, dtype=complex), tol=0,
        )
    except spla.ArpackError as exc:
        raise NonConvergenceError(f"sparse eigensolver failed: {exc}") from exc
    order = np.argsort(w)
    return EigenSystem(w[order], v[:, order])


def qubit_spectrum(p: CircuitParams, n_levels: int = 6, solver: str = "sparse") -> np.ndarray:
    if not 1 <= n_levels <= 10:
        raise InvalidSpecError("n_levels must lie in 1..10")
    return lowest_levels(p, n_levels, solver).values


def gap_vs_falpha(
    p: CircuitParams, f_alpha_values, *, tie_sigma: bool = True, solver: str = "sparse"
) -> np.ndarray:
    """Qubit gap E1 - E0 at f_eps = 0 across ``f_alpha_values``."""
    gaps = []
    for fa in np.asarray(f_alpha_values, dtype=float):
        q = p.with_flux(f_alpha=float(fa), f_eps=0.0, tie_sigma=tie_sigma)
        e = qubit_spectrum(q, 2, solver)
        gaps.append(e[1] - e[0])
    return np.array(gaps)


def real_gauge(v: np.ndarray, Nc: int) -> np.ndarray:
    """Fix the phase so the phase-space wavefunction is real.

    A real wavefunction has ``c(-k, -l) = conj(c(k, l))``, which makes
    ``sum c(k,l) c(-k,-l)`` real and positive; the residual sign is fixed by
    making the largest-magnitude component's real part positive.
    """
    m = 2 * Nc + 1
    c = v.reshape(m, m)
    s = np.sum(c * c[::-1, ::-1])
    if abs(s) > 1e-14:
        v = v * np.exp(-0.5j * np.angle(s))
    i = int(np.argmax(np.abs(v)))
    if v[i].real < 0:
        v = -v
    return v


def coupling_elements(
    p: CircuitParams, es: EigenSystem | None = None, solver: str = "sparse"
) -> CouplingReport:
    """Matrix elements of dH/df_eps between the lowest two eigenstates.

    The excited state's sign is chosen so that ``g_perp >= 0``; ``g_par`` and
    the loop currents do not depend on that choice.
    """
    if es is None:
        es = lowest_levels(p, 2, solver)
    if es.values[1] - es.values[0] <= 1e-8:
        raise DegenerateLevelsError(
            f"lowest levels are degenerate (gap {es.values[1] - es.values[0]:.2e})"
        )
    D = d_hamiltonian_d_feps(p).entries
    g = real_gauge(es.vectors[:, 0], p.N_charge)
    e = real_gauge(es.vectors[:, 1], p.N_charge)
    g_perp = np.vdot(e, D @ g)
    if g_perp.real < 0:
        e, g_perp = -e, -g_perp
    plus = (e + g) / math.sqrt(2.0)
    minus = (e - g) / math.sqrt(2.0)
    return CouplingReport(
        g_perp=float(g_perp.real),
        g_par=float(np.vdot(plus, D @ minus).real),
        I_0=float(np.vdot(g, D @ g).real),
        I_1=float(np.vdot(e, D @ e).real),
    )


def _gap(p: CircuitParams) -> float:
    e = qubit_spectrum(p, 2)
    return float(e[1] - e[0])


def two_level_reduction(p: CircuitParams, *, h: float = 1e-4, tol: float = 1e-8) -> QubitReduction:
    """Map the lowest doublet onto ``-(eps sigma_z + delta sigma_x) / 2``.

    ``I_p = eps / (2 f_eps)``; at f_eps = 0 it is the Richardson-extrapolated
    slope from f_eps = h and h / 2.
    """
    delta = _gap(p.with_flux(f_eps=0.0))
    omega = delta if p.f_eps == 0 else _gap(p)

    def bias(om: float, fe: float) -> float:
        if om < delta - tol:
            raise InconsistentDoubletError(
                f"gap {om:.10g} below its optimal-point value {delta:.10g} at f_eps={fe}"
            )
        return math.copysign(math.sqrt(max(om * om - delta * delta, 0.0)), fe)

    eps = bias(omega, p.f_eps) if p.f_eps != 0 else 0.0
    if p.f_eps != 0:
        I_p = eps / (2.0 * p.f_eps)
    else:
        s1 = bias(_gap(p.with_flux(f_eps=h)), h) / (2 * h)
        s2 = bias(_gap(p.with_flux(f_eps=h / 2)), h / 2) / h
        I_p = 2.0 * s2 - s1
    return QubitReduction(omega=omega, delta=delta, eps_bias=eps, I_p=I_p)


def chain_coupling_strength(p_j: CircuitParams, p_j1: CircuitParams, M: float) -> float:
    """Flip-flop coupling ``M g_perp(j) g_perp(j+1)`` between neighbouring qubits."""
    return M * coupling_elements(p_j).g_perp * coupling_elements(p_j1).g_perp


def chain_spec_from_circuit(p: CircuitParams, L: int, M_a: float, M_b: float) -> ChainSpec:
    """Identical qubits with alternating mutual inductances ``M_a``, ``M_b``."""
    g = coupling_elements(p).g_perp
    return ChainSpec(L=L, a=M_a * g * g, b=M_b * g * g, omega=_gap(p))


def feps_sweep(
    p: CircuitParams, f_eps_values, n_levels: int = 6, solver: str = "sparse"
) -> tuple[np.ndarray, list[CouplingReport]]:
    """Lowest levels and coupling elements along an f_eps sweep, one solve per point."""
    levels, reports = [], []
    for fe in np.asarray(f_eps_values, dtype=float):
        q = p.with_flux(f_eps=float(fe))
        es = lowest_levels(q, max(n_levels, 2), solver)
        levels.append(es.values[:n_levels])
        reports.append(coupling_elements(q, es))
    return np.array(levels), reports
