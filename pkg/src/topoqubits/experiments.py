"""Experiment drivers behind the CLI subcommands.

Each ``run_*`` takes a validated :class:`RunConfig` and an :class:`OutputSet`
and returns a JSON-able summary.  They do no file management of their own.
"""
from __future__ import annotations

import numpy as np

from . import circuit, dynamics, lattice_models as lm, pumping, spectral
from .config import RunConfig
from .errors import NeverCrossedError, NoEdgeModeError
from .outputs import OutputSet, Table, numbered


def _sites(n: int) -> list[str]:
    return numbered("site", n, start=1)


def run_spectrum(cfg: RunConfig, out: OutputSet) -> dict:
    s = cfg.sweep
    n_a = int(round((s.a_max - s.a_min) / s.a_step)) + 1
    a_values = s.a_min + s.a_step * np.arange(n_a)
    n = 2 * cfg.chain.L
    levels = np.array([spectral.eigh_tridiagonal(lm.build_ssh(cfg.chain_spec(a=a))).values
                       for a in a_values])
    out.table("spectrum_vs_a", Table(["a"] + numbered("level", n), np.column_stack([a_values, levels])),
              plot="line", ylabel="E", title="single-excitation spectrum")

    site = np.arange(1, n + 1)
    amp_cols, sz_cols, names = [], [], []
    reports = {}
    mid = (cfg.chain.L - 1, cfg.chain.L)
    for a in s.profile_a:
        spec = cfg.chain_spec(a=float(a))
        es = spectral.eigh_tridiagonal(lm.build_ssh(spec))
        for k in mid:
            names.append(f"a{a:g}_level_{k:02d}")
            amp_cols.append(es.vectors[:, k])
            sz_cols.append(spectral.sigma_z_profile(es.vectors[:, k]))
        try:
            rep = spectral.find_edge_modes(es, spec.omega, a=spec.a, b=spec.b)
            reports[f"{a:g}"] = {
                "indices": list(rep.indices),
                "splitting": rep.splitting,
                "xi_fit": rep.xi_fit,
                "xi_theory": rep.xi_theory,
                "left_state": rep.left_state.real,
                "right_state": rep.right_state.real,
                "left_sigma_z": spectral.sigma_z_profile(rep.left_state),
            }
        except NoEdgeModeError as exc:
            reports[f"{a:g}"] = {"edge_modes": None, "reason": str(exc)}
    out.table("eigenvectors", Table(["site"] + names, np.column_stack([site] + amp_cols)),
              plot="line", ylabel="amplitude")
    out.table("sigma_z_profiles", Table(["site"] + names, np.column_stack([site] + sz_cols)),
              plot="line", ylabel="<sigma_z>")
    out.json("edge_modes", reports)
    return {"n_a": n_a, "edge_modes": {k: v.get("splitting") for k, v in reports.items()}}


def run_quench(cfg: RunConfig, out: OutputSet) -> dict:
    q = cfg.quench
    grid = cfg.time_grid()
    d = cfg.disorder_spec()
    L = cfg.chain.L
    summary = {}
    for name in q.chains:
        spec = cfg.chain_spec() if name == "ssh" else cfg.chain_spec(a=q.uniform_a)
        h = lm.apply_disorder(lm.build_ssh(spec), d)
        traj = dynamics.evolve_static(
            h, dynamics.initial_excitation(L, q.site), grid, record_every=cfg.grid.record_every
        )
        sz = dynamics.sigma_z_trajectory(traj)
        out.table(f"quench_{name}_sigma_z", Table(["time"] + _sites(2 * L), np.column_stack([traj.times, sz])),
                  plot="heatmap", ylabel="<sigma_z>", title=f"quench, {name} chain")
        out.table(f"quench_{name}_site1", Table(["time", "sigma_z_site_01"], np.column_stack([traj.times, sz[:, 0]])),
                  plot="line", ylabel="<sigma_1^z>")
        try:
            arrival = dynamics.front_arrival_time(traj, 2 * L, -0.5)
        except NeverCrossedError:
            arrival = None
        summary[name] = {
            "a": spec.a, "b": spec.b,
            "mean_sigma_z_site1": float(np.mean(sz[:, 0])),
            "min_sigma_z_site1": float(np.min(sz[:, 0])),
            "far_end_arrival_time": arrival,
            "excitation_error": traj.excitation_error(),
        }
    out.json("quench_summary", summary)
    return summary


def run_pump(cfg: RunConfig, out: OutputSet) -> dict:
    p = cfg.pump
    L = cfg.chain.L
    n = 2 * L
    omega = cfg.chain.omega
    d = cfg.disorder_spec()
    sched = pumping.make_pump_schedule(p.T, p.u0)

    ispec = pumping.instantaneous_spectrum(sched, L, p.n_samples, omega=omega, disorder=d)
    out.table(
        "instantaneous_spectrum",
        Table(["time"] + numbered("level", n) + ["branch_index", "branch_energy"],
              np.column_stack([ispec.t_samples, ispec.levels, ispec.edge_branch, ispec.branch_energies])),
    )
    out.table("instantaneous_spectrum_levels",
              Table(["time"] + numbered("level", n), np.column_stack([ispec.t_samples, ispec.levels])),
              plot="line", ylabel="E")

    keep = p.fidelity
    traj = pumping.run_pump(L, sched, p.n_cycles, d, cfg.stepper(keep_states=keep),
                            dt=cfg.grid.dt, omega=omega)
    out.table("pump_sigma_z", Table(["time"] + _sites(n), np.column_stack([traj.times, traj.sigma_z])),
              plot="heatmap", ylabel="<sigma_z>", title=f"pump, T={p.T:g}")
    summary = {
        "T": p.T, "u0": p.u0, "n_cycles": p.n_cycles,
        "winding_number": pumping.winding_number(sched),
        "transfer": [
            {"cycle": c,
             "P_last_site": pumping.transfer_probability(traj, n, c * p.T),
             "P_first_site": pumping.transfer_probability(traj, 1, c * p.T)}
            for c in range(1, p.n_cycles + 1)
        ],
        "branch": pumping.gap_traversal(ispec, omega),
    }
    if keep:
        fid = pumping.adiabatic_fidelity(traj, sched, omega=omega, disorder=d)
        out.table("adiabatic_fidelity", Table.from_columns(time=traj.times, fidelity=fid),
                  plot="line", ylabel="fidelity")
        summary["min_fidelity"] = float(np.min(fid))
    if p.T_sweep:
        rows = []
        for T in p.T_sweep:
            s = pumping.make_pump_schedule(float(T), p.u0)
            tr = pumping.run_pump(L, s, 1, d, cfg.stepper(), dt=cfg.grid.dt, omega=omega)
            rows.append((T, pumping.transfer_probability(tr, n, float(T))))
        tab = Table(["T", "P_last_site"], np.array(rows))
        out.table("transfer_vs_T", tab, plot="line", ylabel=f"P_{n}(T)")
        summary["T_sweep"] = tab.data
    out.json("pump_summary", summary)
    return summary


def run_circuit(cfg: RunConfig, out: OutputSet) -> dict:
    c = cfg.circuit
    base = cfg.circuit_params()
    fe = np.linspace(-c.feps_max, c.feps_max, c.n_feps)
    levels, reports = circuit.feps_sweep(base, fe, c.n_levels)
    out.table("levels_vs_feps", Table(["f_eps"] + numbered("level", c.n_levels), np.column_stack([fe, levels])),
              plot="line", ylabel="E / E_J")
    out.table("g_par_vs_feps", Table.from_columns(f_eps=fe, g_par=[r.g_par for r in reports]),
              plot="line", ylabel="g_par")
    out.table("g_perp_vs_feps", Table.from_columns(f_eps=fe, g_perp=[r.g_perp for r in reports]),
              plot="line", ylabel="g_perp")
    out.table("loop_currents_vs_feps",
              Table.from_columns(f_eps=fe, I_0=[r.I_0 for r in reports], I_1=[r.I_1 for r in reports]))
    fa = np.linspace(c.falpha_min, c.falpha_max, c.n_falpha)
    gaps = [
        circuit.qubit_spectrum(cfg.circuit_params(f_alpha=float(x), f_sigma=c.sigma_ratio * float(x)), 2)
        for x in fa
    ]
    gaps = np.array([g[1] - g[0] for g in gaps])
    out.table("gap_vs_falpha", Table.from_columns(f_alpha=fa, gap=gaps), plot="line", ylabel="omega / E_J")

    red = circuit.two_level_reduction(base)
    opt = circuit.coupling_elements(base)
    summary = {
        "two_level": red.__dict__,
        "optimal_point": opt.__dict__,
        "gap_tunability_ratio": float(gaps.max() / gaps.min()) if gaps.min() > 0 else None,
    }
    if c.convergence_check:
        ref = cfg.circuit_params(N_charge=c.reference_N_charge)
        e_cfg = circuit.qubit_spectrum(base, c.n_levels)
        e_ref = circuit.qubit_spectrum(ref, c.n_levels)
        drift = float(np.max(np.abs(e_cfg - e_ref))) / base.E_J
        g_ref = circuit.coupling_elements(ref)
        drift = max(drift, abs(g_ref.g_perp - opt.g_perp) / base.E_J)
        summary["cutoff_drift"] = drift
        if drift > c.convergence_tol:
            out.warn(
                f"charge cutoff N_charge={base.N_charge} differs from N_charge="
                f"{ref.N_charge} by {drift:.3e} E_J (> {c.convergence_tol:g})"
            )
    out.json("circuit_summary", summary)
    return summary


def run_aah(cfg: RunConfig, out: OutputSet) -> dict:
    a = cfg.aah
    phases = 2 * np.pi * np.arange(a.n_phase) / a.n_phase
    levels = np.array([
        spectral.eigh_tridiagonal(lm.build_aah(a.L2, a.a_uniform, a.omega, a.alpha_mod, ph)).values
        for ph in phases
    ])
    out.table("aah_spectrum_vs_phase", Table(["phase"] + numbered("level", a.L2), np.column_stack([phases, levels])),
              plot="line", ylabel="E")
    summary = {"largest_gaps": largest_gaps(levels.ravel(), 4)}
    if a.n_alpha:
        alphas = np.linspace(0.0, 1.0, a.n_alpha)
        butterfly = np.array([
            spectral.eigh_tridiagonal(lm.build_aah(a.L2, a.a_uniform, a.omega, al, 0.0)).values
            for al in alphas
        ])
        out.table("aah_spectrum_vs_alpha",
                  Table(["alpha_mod"] + numbered("level", a.L2), np.column_stack([alphas, butterfly])),
                  plot="line", ylabel="E")
    out.json("aah_summary", summary)
    return summary


def largest_gaps(energies: np.ndarray, k: int) -> list[dict]:
    """The ``k`` widest empty intervals inside the union of ``energies``."""
    e = np.sort(np.asarray(energies))
    widths = np.diff(e)
    order = np.argsort(widths)[::-1][:k]
    return [{"lower": float(e[i]), "upper": float(e[i + 1]), "width": float(widths[i])}
            for i in sorted(order)]


RUNNERS = {
    "spectrum": run_spectrum,
    "quench": run_quench,
    "pump": run_pump,
    "circuit": run_circuit,
    "aah": run_aah,
}
