"""Run configuration: INI-style sections, presets, and validation.

Example::

    [run]
    experiment = quench
    seed = 7
    formats = csv,json,svg

    [chain]
    L = 7
    b = 1.0

    [quench]
    chains = ssh,uniform

Every key is optional; unknown sections or keys are rejected.
"""
from __future__ import annotations

import configparser
import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field

from .circuit import CircuitParams
from .dynamics import StepperConfig, TimeGrid
from .errors import ConfigError, InvalidSpecError
from .lattice_models import ChainSpec, DisorderSpec
from .pumping import make_pump_schedule

EXPERIMENTS = ("spectrum", "quench", "pump", "circuit", "aah")
FORMATS = ("csv", "json", "svg")
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_FLOAT_LISTS = {"sweep.profile_a", "pump.T_sweep"}


@dataclass
class RunSection:
    experiment: str = "spectrum"
    seed: int = 0
    formats: tuple = FORMATS


@dataclass
class ChainSection:
    L: int = 7
    a: float = 0.1
    b: float = 1.0
    omega: float = 0.0


@dataclass
class SweepSection:
    a_min: float = 0.0
    a_max: float = 2.0
    a_step: float = 0.02
    profile_a: tuple = (0.1, 1.0)


@dataclass
class DisorderSection:
    sigma_coupling: float = 0.0
    sigma_frequency: float = 0.0


@dataclass
class GridSection:
    t0: float = 0.0
    t1: float = 100.0
    dt: float = 0.01
    record_every: int = 10


@dataclass
class QuenchSection:
    chains: tuple = ("ssh", "uniform")
    site: int = 1
    uniform_a: float = 1.0


@dataclass
class PumpSection:
    T: float = 100.0
    u0: float = 1.0
    n_cycles: int = 1
    n_samples: int = 401
    method: str = "midpoint-exponential"
    fidelity: bool = True
    T_sweep: tuple = ()


@dataclass
class CircuitSection:
    E_J: float = 1.0
    ratio_EJ_EC: float = 50.0
    alpha: float = 0.5
    beta: float = 0.05
    f_alpha: float = 0.2
    sigma_ratio: float = 50.0
    N_fluxoid: int = 1
    n_fluxoid: int = 1
    N_charge: int = 15
    n_levels: int = 6
    feps_max: float = 0.01
    n_feps: int = 101
    falpha_min: float = 0.0
    falpha_max: float = 0.5
    n_falpha: int = 51
    convergence_check: bool = False
    reference_N_charge: int = 15
    convergence_tol: float = 1e-6


@dataclass
class AAHSection:
    L2: int = 55
    a_uniform: float = 1.0
    omega: float = 1.0
    alpha_mod: float = GOLDEN
    n_phase: int = 128
    n_alpha: int = 0


@dataclass
class RunConfig:
    run: RunSection = field(default_factory=RunSection)
    chain: ChainSection = field(default_factory=ChainSection)
    sweep: SweepSection = field(default_factory=SweepSection)
    disorder: DisorderSection = field(default_factory=DisorderSection)
    grid: GridSection = field(default_factory=GridSection)
    quench: QuenchSection = field(default_factory=QuenchSection)
    pump: PumpSection = field(default_factory=PumpSection)
    circuit: CircuitSection = field(default_factory=CircuitSection)
    aah: AAHSection = field(default_factory=AAHSection)

    @property
    def experiment(self) -> str:
        return self.run.experiment

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, default=list).encode()
        return hashlib.sha256(blob).hexdigest()

    # typed views, each validated by its owning type
    def chain_spec(self, a: float | None = None) -> ChainSpec:
        c = self.chain
        return ChainSpec(L=c.L, a=c.a if a is None else a, b=c.b, omega=c.omega)

    def disorder_spec(self) -> DisorderSpec:
        d = self.disorder
        return DisorderSpec(d.sigma_coupling, d.sigma_frequency, self.run.seed)

    def time_grid(self) -> TimeGrid:
        g = self.grid
        return TimeGrid.from_dt(g.t0, g.t1, g.dt)

    def stepper(self, keep_states: bool = False) -> StepperConfig:
        return StepperConfig(
            method=self.pump.method,
            dt_max=self.grid.dt,
            record_every=self.grid.record_every,
            keep_states=keep_states,
        )

    def circuit_params(self, **overrides) -> CircuitParams:
        c = self.circuit
        kw = dict(
            E_J=c.E_J, ratio_EJ_EC=c.ratio_EJ_EC, alpha=c.alpha, beta=c.beta,
            f_alpha=c.f_alpha, f_eps=0.0, f_sigma=c.sigma_ratio * c.f_alpha,
            N_fluxoid=c.N_fluxoid, n_fluxoid=c.n_fluxoid, N_charge=c.N_charge,
        )
        kw.update(overrides)
        return CircuitParams(**kw)

    def validate(self) -> "RunConfig":
        """Build every typed object the experiment needs; raise ConfigError on failure."""
        r = self.run
        if r.experiment not in EXPERIMENTS:
            raise ConfigError(f"run.experiment: unknown {r.experiment!r}; choose from {EXPERIMENTS}")
        bad = [f for f in r.formats if f not in FORMATS]
        if bad or not r.formats:
            raise ConfigError(f"run.formats: unsupported {bad or 'empty'}; choose from {FORMATS}")
        if not 0 <= r.seed < 2**64:
            raise ConfigError("run.seed: must be an unsigned 64-bit integer")
        checks = {
            "spectrum": [("chain", self.chain_spec), ("sweep", self._check_sweep)],
            "quench": [("chain", self.chain_spec), ("disorder", self.disorder_spec),
                       ("grid", self.time_grid), ("quench", self._check_quench)],
            "pump": [("chain", self.chain_spec), ("disorder", self.disorder_spec),
                     ("grid", self.time_grid), ("pump", self._check_pump)],
            "circuit": [("circuit", self._check_circuit)],
            "aah": [("aah", self._check_aah)],
        }[r.experiment]
        for section, check in checks:
            try:
                check()
            except (InvalidSpecError, ValueError, TypeError) as exc:
                raise ConfigError(f"[{section}] {exc}") from exc
        return self

    def _check_sweep(self):
        s = self.sweep
        if not (s.a_step > 0 and s.a_max >= s.a_min >= 0):
            raise InvalidSpecError("need a_step > 0 and 0 <= a_min <= a_max")
        for a in s.profile_a:
            self.chain_spec(a=float(a))

    def _check_quench(self):
        q = self.quench
        bad = [c for c in q.chains if c not in ("ssh", "uniform")]
        if bad or not q.chains:
            raise InvalidSpecError(f"chains must be drawn from ssh, uniform; got {q.chains}")
        if not 1 <= q.site <= 2 * self.chain.L:
            raise InvalidSpecError(f"site {q.site} outside 1..{2 * self.chain.L}")
        self.chain_spec(a=q.uniform_a)
        if self.grid.record_every < 1:
            raise InvalidSpecError("grid.record_every must be >= 1")

    def _check_pump(self):
        p = self.pump
        make_pump_schedule(p.T, p.u0)
        for T in p.T_sweep:
            make_pump_schedule(float(T), p.u0)
        if p.n_cycles < 1 or p.n_samples < 2:
            raise InvalidSpecError("need n_cycles >= 1 and n_samples >= 2")
        self.stepper()

    def _check_circuit(self):
        c = self.circuit
        self.circuit_params()
        self.circuit_params(N_charge=c.reference_N_charge)
        if not (c.feps_max > 0 and c.n_feps >= 3 and c.n_falpha >= 2):
            raise InvalidSpecError("need feps_max > 0, n_feps >= 3, n_falpha >= 2")
        if not 2 <= c.n_levels <= 10:
            raise InvalidSpecError("n_levels must lie in 2..10")

    def _check_aah(self):
        from .lattice_models import build_aah

        a = self.aah
        build_aah(a.L2, a.a_uniform, a.omega, a.alpha_mod, 0.0)
        if a.n_phase < 1 or a.n_alpha < 0:
            raise InvalidSpecError("need n_phase >= 1 and n_alpha >= 0")


def _coerce(value: str, default, where: str):
    try:
        if isinstance(default, bool):
            v = value.strip().lower()
            if v in ("1", "true", "yes", "on"):
                return True
            if v in ("0", "false", "no", "off"):
                return False
            raise ValueError(value)
        if isinstance(default, int):
            return int(value)
        if isinstance(default, float):
            return float(value)
        if isinstance(default, tuple):
            items = [x.strip() for x in value.split(",") if x.strip()]
            if where in _FLOAT_LISTS:
                return tuple(float(x) for x in items)
            return tuple(items)
        return value.strip()
    except ValueError as exc:
        raise ConfigError(f"{where}: cannot parse {value!r}") from exc


def set_value(cfg: RunConfig, dotted: str, value: str) -> None:
    """Apply ``section.key = value`` from text."""
    if "." not in dotted:
        raise ConfigError(f"override {dotted!r} must look like section.key")
    section, key = dotted.split(".", 1)
    sec = getattr(cfg, section, None)
    if sec is None or not dataclasses.is_dataclass(sec):
        raise ConfigError(f"unknown section [{section}]")
    if not hasattr(sec, key):
        raise ConfigError(f"unknown key {key!r} in [{section}]")
    setattr(sec, key, _coerce(value, getattr(sec, key), dotted))


def load_config(path, cfg: RunConfig | None = None) -> RunConfig:
    cfg = cfg or RunConfig()
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for section in parser.sections():
        for key, value in parser.items(section):
            set_value(cfg, f"{section}.{key}", value)
    return cfg


# --- presets -----------------------------------------------------------------


def _preset(experiment: str, **sections) -> RunConfig:
    cfg = RunConfig()
    cfg.run.experiment = experiment
    for dotted, value in sections.items():
        section, key = dotted.split("__")
        setattr(getattr(cfg, section), key, value)
    return cfg


PRESETS = {
    "fig3": ("spectrum", "spectrum vs a and edge/bulk wavefunctions, 2L=14",
             lambda: _preset("spectrum")),
    "fig4": ("quench", "quench after flipping qubit 1: SSH a=0.1 and uniform a=b=1, 10% of a noise",
             lambda: _preset("quench", disorder__sigma_coupling=0.01,
                             disorder__sigma_frequency=0.01)),
    "fig5": ("pump", "instantaneous spectrum and clean adiabatic pump, T=100",
             lambda: _preset("pump")),
    "fig6": ("pump", "pump run with 1% of b noise, T=100",
             lambda: _preset("pump", disorder__sigma_coupling=0.01,
                             disorder__sigma_frequency=0.01)),
    "pump-cycles": ("pump", "three pump cycles showing the Landau-Zener degradation",
                    lambda: _preset("pump", pump__n_cycles=3, pump__fidelity=False)),
    "pump-tsweep": ("pump", "transfer probability for T in {25, 50, 100, 200}",
                    lambda: _preset("pump", pump__T_sweep=(25.0, 50.0, 100.0, 200.0),
                                    pump__fidelity=False)),
    "fig7": ("circuit", "gap-tunable flux qubit: levels, gap(f_alpha), g_par, g_perp",
             lambda: _preset("circuit")),
    "aah": ("aah", "AAH chain spectrum vs phase and modulation frequency",
            lambda: _preset("aah", aah__n_alpha=101)),
}


def preset_config(name: str) -> RunConfig:
    try:
        return PRESETS[name][2]()
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; see --list-presets") from None
