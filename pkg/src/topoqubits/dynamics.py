"""Closed-system single-excitation dynamics.

Static Hamiltonians are propagated exactly through their eigen-expansion;
time-dependent ones with the exponential midpoint rule
``psi(t + dt) = exp(-i H(t + dt/2) dt) psi(t)``, each step exponentiated through
the eigen-decomposition of the instantaneous tridiagonal matrix.  RK4 is kept
as an independent cross-check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidSpecError, NeverCrossedError, NonConvergenceError, StepSizeError
from .lattice_models import TridiagonalHamiltonian
from .spectral import eigh_tridiagonal

HBuilder = Callable[[float], TridiagonalHamiltonian]

METHODS = ("midpoint-exponential", "rk4", "spectral-expansion")

_CONSERVATION_TOL = 1e-8
_BATCH = 4096


@dataclass(frozen=True)
class TimeGrid:
    t0: float
    t1: float
    n_steps: int

    def __post_init__(self):
        if not (math.isfinite(self.t0) and math.isfinite(self.t1)) or not self.t1 > self.t0:
            raise InvalidSpecError(f"need t1 > t0, got [{self.t0}, {self.t1}]")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise InvalidSpecError("n_steps must be an integer >= 1")

    @classmethod
    def from_dt(cls, t0: float, t1: float, dt: float) -> "TimeGrid":
        if not (math.isfinite(dt) and dt > 0):
            raise InvalidSpecError(f"dt must be > 0, got {dt}")
        return cls(t0, t1, max(1, int(round((t1 - t0) / dt))))

    @property
    def dt(self) -> float:
        return (self.t1 - self.t0) / self.n_steps

    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n_steps + 1)


@dataclass(frozen=True)
class StepperConfig:
    method: str = "midpoint-exponential"
    dt_max: float = 0.01
    tolerance: float = 1e-8
    record_every: int = 1
    keep_states: bool = False

    def __post_init__(self):
        if self.method not in METHODS:
            raise InvalidSpecError(f"unknown stepper {self.method!r}; choose from {METHODS}")
        if not (self.dt_max > 0 and self.tolerance > 0):
            raise InvalidSpecError("dt_max and tolerance must be > 0")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise InvalidSpecError("record_every must be an integer >= 1")


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    sigma_z: np.ndarray
    states: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.sigma_z.shape[0] != len(self.times):
            raise InvalidSpecError("sigma_z rows must match times")
        if self.states is not None and self.states.shape[0] != len(self.times):
            raise InvalidSpecError("states rows must match times")

    @property
    def n_sites(self) -> int:
        return self.sigma_z.shape[1]

    def populations(self) -> np.ndarray:
        return (self.sigma_z + 1.0) / 2.0

    def excitation_error(self) -> float:
        return float(np.max(np.abs(self.populations().sum(axis=1) - 1.0)))

    def norm_error(self) -> float:
        if self.states is None:
            return self.excitation_error()
        return float(np.max(np.abs(np.linalg.norm(self.states, axis=1) - 1.0)))

    def validate(self, tol: float = _CONSERVATION_TOL) -> None:
        z = self.sigma_z
        if np.any(z < -1 - 1e-9) or np.any(z > 1 + 1e-9):
            raise NonConvergenceError("sigma_z left [-1, 1]")
        if self.excitation_error() > tol:
            raise NonConvergenceError(
                f"single-excitation sum drifted by {self.excitation_error():.2e}"
            )


def _check_state(psi0: np.ndarray, n: int) -> np.ndarray:
    psi = np.asarray(psi0, dtype=complex).ravel()
    if psi.shape != (n,):
        raise InvalidSpecError(f"state has {psi.size} amplitudes, chain has {n} sites")
    if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise InvalidSpecError("initial state must be normalized")
    return psi


def initial_excitation(L: int, site: int) -> np.ndarray:
    """|e_site> on a chain of 2L sites (site is 1-based)."""
    n = 2 * L
    if not 1 <= site <= n:
        raise IndexError(f"site {site} outside 1..{n}")
    psi = np.zeros(n, dtype=complex)
    psi[site - 1] = 1.0
    return psi


def _make_trajectory(times, states, keep_states, tol=_CONSERVATION_TOL) -> Trajectory:
    states = np.asarray(states)
    sz = 2.0 * np.abs(states) ** 2 - 1.0
    traj = Trajectory(times, sz, states if keep_states else None)
    traj.validate(tol)
    return traj


def evolve_static(
    h: TridiagonalHamiltonian,
    psi0: np.ndarray,
    grid: TimeGrid,
    *,
    record_every: int = 1,
    keep_states: bool = False,
) -> Trajectory:
    psi0 = _check_state(psi0, h.n_sites)
    es = eigh_tridiagonal(h)
    coeff = es.vectors.T @ psi0
    times = grid.times()[::record_every]
    phases = np.exp(-1j * np.outer(times, es.values))
    states = (phases * coeff) @ es.vectors.T
    return _make_trajectory(times, states, keep_states)


def _midpoint_propagators(hbuilder: HBuilder, tmid: np.ndarray, dt: float):
    """Yield (n, n) step propagators exp(-i H(tmid_k) dt) in batches."""
    for start in range(0, len(tmid), _BATCH):
        chunk = tmid[start : start + _BATCH]
        Hs = np.stack([hbuilder(float(t)).to_dense() for t in chunk])
        try:
            w, V = np.linalg.eigh(Hs)
        except np.linalg.LinAlgError as exc:
            raise NonConvergenceError(f"step eigensolver failed: {exc}") from exc
        U = (V * np.exp(-1j * w * dt)[:, None, :]) @ V.transpose(0, 2, 1)
        yield from U


def _rk4_steps(hbuilder: HBuilder, t_start: np.ndarray, dt: float):
    def step(t, psi):
        h0, hm, h1 = hbuilder(t), hbuilder(t + dt / 2), hbuilder(t + dt)
        k1 = -1j * h0.matvec(psi)
        k2 = -1j * hm.matvec(psi + dt / 2 * k1)
        k3 = -1j * hm.matvec(psi + dt / 2 * k2)
        k4 = -1j * h1.matvec(psi + dt * k3)
        return psi + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)

    for t in t_start:
        yield lambda psi, t=t: step(float(t), psi)


def evolve_time_dependent(
    hbuilder: HBuilder,
    psi0: np.ndarray,
    grid: TimeGrid,
    cfg: StepperConfig | None = None,
) -> Trajectory:
    """Propagate under ``H(t) = hbuilder(t)``.

    Grid intervals longer than ``cfg.dt_max`` are subdivided; observables are
    recorded every ``cfg.record_every`` grid steps.
    """
    cfg = cfg or StepperConfig()
    n = hbuilder(grid.t0).n_sites
    psi = _check_state(psi0, n)

    if cfg.method == "spectral-expansion":
        traj = evolve_static(
            hbuilder(grid.t0), psi, grid, record_every=cfg.record_every, keep_states=True
        )
        return Trajectory(traj.times, traj.sigma_z, traj.states if cfg.keep_states else None)

    n_sub = max(1, math.ceil(grid.dt / cfg.dt_max - 1e-12))
    n_fine = grid.n_steps * n_sub
    h = grid.dt / n_sub
    record_stride = n_sub * cfg.record_every
    t_start = grid.t0 + h * np.arange(n_fine)

    if cfg.method == "midpoint-exponential":
        steps = ((lambda psi, U=U: U @ psi) for U in _midpoint_propagators(hbuilder, t_start + h / 2, h))
    else:
        steps = _rk4_steps(hbuilder, t_start, h)

    states = [psi.copy()]
    times = [grid.t0]
    for k, step in enumerate(steps, start=1):
        psi = step(psi)
        if k % record_stride == 0 or k == n_fine:
            drift = abs(np.linalg.norm(psi) - 1.0)
            if drift > cfg.tolerance:
                raise StepSizeError(
                    f"norm drift {drift:.2e} > {cfg.tolerance:.1e} at t={grid.t0 + k * h:.6g}; halve dt"
                )
            if k % record_stride == 0:
                states.append(psi.copy())
                times.append(grid.t0 + k * h)
    # population sum is the squared norm, so it may drift twice as far
    tol = max(_CONSERVATION_TOL, 2.0 * cfg.tolerance)
    return _make_trajectory(np.array(times), states, cfg.keep_states, tol)


def sigma_z_trajectory(traj: Trajectory) -> np.ndarray:
    traj.validate()
    return traj.sigma_z


def front_arrival_time(traj: Trajectory, site: int, threshold: float) -> float:
    """First recorded time with <sigma_site^z> above ``threshold``."""
    if not -1 < threshold < 1:
        raise InvalidSpecError("threshold must lie in (-1, 1)")
    if not 1 <= site <= traj.n_sites:
        raise IndexError(f"site {site} outside 1..{traj.n_sites}")
    hits = np.flatnonzero(traj.sigma_z[:, site - 1] > threshold)
    if len(hits) == 0:
        raise NeverCrossedError(f"<sigma_{site}^z> never exceeds {threshold}")
    return float(traj.times[hits[0]])


def expected_energy(h: TridiagonalHamiltonian, states: np.ndarray) -> np.ndarray:
    return np.real(np.einsum("ti,ti->t", states.conj(), np.array([h.matvec(s) for s in states])))
