"""Rice-Mele adiabatic pumping of an edge excitation.

The default cycle is ``a(t) = 1 - cos(2 pi t / T)``, ``b(t) = 1``,
``u(t) = -u0 sin(2 pi t / T)``, which encircles the band-touching point
``(a - b, u) = (0, 0)`` once per period.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .dynamics import (
    StepperConfig,
    TimeGrid,
    Trajectory,
    evolve_time_dependent,
    initial_excitation,
)
from .errors import BranchTrackingError, InvalidSpecError, MissingStatesError
from .lattice_models import (
    ChainSpec,
    DisorderSpec,
    TridiagonalHamiltonian,
    build_rice_mele,
    draw_disorder,
)
from .spectral import center_of_mass

ParamFn = Callable[[float], float]

OVERLAP_FLOOR = 0.5
_DEGENERACY_TOL = 1e-9


@dataclass(frozen=True)
class PumpSchedule:
    T: float
    u0: float
    a_of_t: ParamFn = field(repr=False)
    b_of_t: ParamFn = field(repr=False)
    u_of_t: ParamFn = field(repr=False)

    def at(self, t: float) -> tuple[float, float, float]:
        return self.a_of_t(t), self.b_of_t(t), self.u_of_t(t)

    def chain(self, t: float, L: int, omega: float = 0.0) -> ChainSpec:
        a, b, u = self.at(t)
        return ChainSpec(L=L, a=max(a, 0.0), b=b, omega=omega, u=u)

    def reversed(self) -> "PumpSchedule":
        """Same loop traversed in the opposite direction (t -> -t)."""
        return PumpSchedule(
            self.T,
            self.u0,
            lambda t: self.a_of_t(-t),
            lambda t: self.b_of_t(-t),
            lambda t: self.u_of_t(-t),
        )


def make_pump_schedule(T: float, u0: float = 1.0) -> PumpSchedule:
    if not (math.isfinite(T) and T > 0):
        raise InvalidSpecError(f"T must be > 0, got {T}")
    if not math.isfinite(u0) or u0 == 0:
        raise InvalidSpecError("u0 must be finite and non-zero")
    w = 2.0 * math.pi / T
    return PumpSchedule(
        T,
        u0,
        lambda t: 1.0 - math.cos(w * t),
        lambda t: 1.0,
        lambda t: -u0 * math.sin(w * t),
    )


def winding_number(schedule: PumpSchedule, n_points: int = 2000) -> float:
    """Accumulated angle of (a - b, u) around the origin over one period, / 2 pi."""
    t = np.linspace(0.0, schedule.T, n_points + 1)
    pts = np.array([schedule.at(float(s)) for s in t])
    ang = np.unwrap(np.arctan2(pts[:, 2], pts[:, 0] - pts[:, 1]))
    return float((ang[-1] - ang[0]) / (2.0 * math.pi))


def pump_hamiltonian(
    schedule: PumpSchedule,
    L: int,
    *,
    omega: float = 0.0,
    disorder: DisorderSpec | None = None,
) -> Callable[[float], TridiagonalHamiltonian]:
    """``t -> H(t)`` with one frozen disorder draw added to every entry."""
    n = 2 * L
    if disorder is None or disorder.is_clean:
        dd, de = np.zeros(n), np.zeros(n - 1)
    else:
        dd, de = draw_disorder(n, disorder)

    def h(t: float) -> TridiagonalHamiltonian:
        base = build_rice_mele(schedule.chain(t, L, omega))
        return TridiagonalHamiltonian(base.diag + dd, base.offdiag + de)

    return h


@dataclass(frozen=True, eq=False)
class InstantaneousSpectrum:
    t_samples: np.ndarray
    levels: np.ndarray
    edge_branch: np.ndarray
    branch_states: np.ndarray = field(repr=False)

    @property
    def branch_energies(self) -> np.ndarray:
        return self.levels[np.arange(len(self.t_samples)), self.edge_branch]


def _track(reference: np.ndarray, w: np.ndarray, V: np.ndarray) -> tuple[int, np.ndarray, float]:
    """Follow ``reference`` into the eigenbasis ``(w, V)``.

    The best-overlap level is taken together with any levels degenerate with it;
    the reference is projected onto that cluster, so exact degeneracies (the
    decoupled end sites at a = 0) do not scramble the branch.
    """
    ov = np.abs(V.conj().T @ reference)
    k = int(np.argmax(ov))
    cluster = np.flatnonzero(np.abs(w - w[k]) < _DEGENERACY_TOL)
    P = V[:, cluster]
    v = P @ (P.conj().T @ reference)
    norm = np.linalg.norm(v)
    v = v / norm
    # real gauge continuous with the reference
    phase = np.vdot(v, reference)
    v = v * (phase / abs(phase))
    return k, v, float(norm)


def track_branch(
    hbuilder: Callable[[float], TridiagonalHamiltonian],
    t_samples: np.ndarray,
    reference: np.ndarray,
) -> InstantaneousSpectrum:
    t_samples = np.asarray(t_samples, dtype=float)
    Hs = np.stack([hbuilder(float(t)).to_dense() for t in t_samples])
    levels, vecs = np.linalg.eigh(Hs)
    idx = np.empty(len(t_samples), dtype=int)
    states = np.empty((len(t_samples), Hs.shape[1]), dtype=complex)
    ref = np.asarray(reference, dtype=complex)
    for i in range(len(t_samples)):
        k, v, overlap = _track(ref, levels[i], vecs[i])
        if overlap < OVERLAP_FLOOR:
            raise BranchTrackingError(
                f"successive overlap {overlap:.3f} < {OVERLAP_FLOOR} at sample {i} "
                f"(t={t_samples[i]:.6g})",
                sample_index=i,
            )
        idx[i] = k
        states[i] = v
        ref = v
    return InstantaneousSpectrum(t_samples, levels, idx, states)


def instantaneous_spectrum(
    schedule: PumpSchedule,
    L: int,
    n_samples: int,
    *,
    omega: float = 0.0,
    disorder: DisorderSpec | None = None,
) -> InstantaneousSpectrum:
    """Spectrum at ``n_samples`` equally spaced times over one closed period,
    with the branch continuing the left edge state ``|e_1>`` at t = 0."""
    if n_samples < 2:
        raise InvalidSpecError("n_samples must be >= 2")
    t = np.linspace(0.0, schedule.T, n_samples)
    h = pump_hamiltonian(schedule, L, omega=omega, disorder=disorder)
    return track_branch(h, t, initial_excitation(L, 1))


def run_pump(
    L: int,
    schedule: PumpSchedule,
    n_cycles: int = 1,
    disorder: DisorderSpec | None = None,
    cfg: StepperConfig | None = None,
    *,
    dt: float = 0.01,
    omega: float = 0.0,
    initial_site: int = 1,
) -> Trajectory:
    """Evolve ``|e_initial_site>`` through ``n_cycles`` periods of the pump."""
    if int(n_cycles) != n_cycles or n_cycles < 1:
        raise InvalidSpecError("n_cycles must be an integer >= 1")
    cfg = cfg or StepperConfig(dt_max=dt)
    grid = TimeGrid.from_dt(0.0, n_cycles * schedule.T, dt)
    h = pump_hamiltonian(schedule, L, omega=omega, disorder=disorder)
    return evolve_time_dependent(h, initial_excitation(L, initial_site), grid, cfg)


def adiabatic_fidelity(
    traj: Trajectory,
    schedule: PumpSchedule,
    *,
    omega: float = 0.0,
    disorder: DisorderSpec | None = None,
    reference: np.ndarray | None = None,
) -> np.ndarray:
    """``|<psi_track(t)|psi(t)>|^2`` at each recorded time of ``traj``.

    The tracked eigenvector starts from the trajectory's initial state and is
    followed by successive overlap on the trajectory's own time samples.
    """
    if traj.states is None:
        raise MissingStatesError("trajectory was recorded without states (keep_states=False)")
    L = traj.n_sites // 2
    h = pump_hamiltonian(schedule, L, omega=omega, disorder=disorder)
    ref = traj.states[0] if reference is None else reference
    spec = track_branch(h, traj.times, ref)
    ov = np.einsum("ti,ti->t", spec.branch_states.conj(), traj.states)
    return np.abs(ov) ** 2


def transfer_probability(traj: Trajectory, site: int, t: float) -> float:
    times = traj.times
    span_tol = 1e-9 * max(1.0, abs(times[-1]))
    if t < times[0] - span_tol or t > times[-1] + span_tol:
        raise InvalidSpecError(f"t={t} outside trajectory range [{times[0]}, {times[-1]}]")
    if not 1 <= site <= traj.n_sites:
        raise IndexError(f"site {site} outside 1..{traj.n_sites}")
    k = int(np.argmin(np.abs(times - t)))
    return float((traj.sigma_z[k, site - 1] + 1.0) / 2.0)


def gap_traversal(spec: InstantaneousSpectrum, omega: float = 0.0) -> dict:
    """Summary of how the tracked branch crosses the spectrum over a cycle.

    ``start_gap``/``end_gap``: branch energy offsets from omega at the ends;
    ``excursion``: largest |E - omega| reached along the branch;
    ``com_start``/``com_end``: 1-based centre of mass of the tracked state.
    """
    e = spec.branch_energies - omega
    return {
        "start_gap": float(abs(e[0])),
        "end_gap": float(abs(e[-1])),
        "excursion": float(np.max(np.abs(e))),
        "com_start": center_of_mass(spec.branch_states[0]),
        "com_end": center_of_mass(spec.branch_states[-1]),
    }
