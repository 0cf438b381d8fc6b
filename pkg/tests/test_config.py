import pytest

from topoqubits import config
from topoqubits.errors import ConfigError


def test_defaults_validate_for_every_experiment():
    for e in config.EXPERIMENTS:
        cfg = config.RunConfig()
        cfg.run.experiment = e
        cfg.validate()


def test_load_ini(tmp_path):
    p = tmp_path / "run.ini"
    p.write_text("[run]\nexperiment = pump\nseed = 9\n\n[chain]\nL = 5\n\n[pump]\nT_sweep = 10, 20\nfidelity = no\n")
    cfg = config.load_config(p).validate()
    assert cfg.experiment == "pump"
    assert cfg.run.seed == 9 and cfg.chain.L == 5
    assert cfg.pump.T_sweep == (10.0, 20.0)
    assert cfg.pump.fidelity is False


@pytest.mark.parametrize("text", ["[nope]\nx = 1\n", "[chain]\nLL = 3\n", "[chain]\nL = three\n",
                                  "not an ini"])
def test_bad_ini(tmp_path, text):
    p = tmp_path / "bad.ini"
    p.write_text(text)
    with pytest.raises(ConfigError):
        config.load_config(p)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        config.load_config(tmp_path / "missing.ini")


@pytest.mark.parametrize("experiment,dotted,value,section", [
    ("spectrum", "chain.b", "0", "[chain]"),
    ("quench", "grid.dt", "-1", "[grid]"),
    ("pump", "pump.T", "0", "[pump]"),
    ("circuit", "circuit.N_charge", "2", "[circuit]"),
])
def test_validation_names_the_section(experiment, dotted, value, section):
    cfg = config.RunConfig()
    cfg.run.experiment = experiment
    config.set_value(cfg, dotted, value)
    with pytest.raises(ConfigError, match=rf"\{section}"):
        cfg.validate()


def test_bad_formats():
    cfg = config.RunConfig()
    config.set_value(cfg, "run.formats", "csv,png")
    with pytest.raises(ConfigError):
        cfg.validate()


def test_digest_tracks_content():
    a, b = config.RunConfig(), config.RunConfig()
    assert a.digest() == b.digest()
    config.set_value(b, "run.seed", "1")
    assert a.digest() != b.digest()


def test_every_preset_validates_and_figures_map_once():
    figures = {}
    for name in config.PRESETS:
        cfg = config.preset_config(name).validate()
        assert cfg.experiment == config.PRESETS[name][0]
        if name.startswith("fig"):
            figures[name] = cfg.experiment
    assert sorted(figures) == ["fig3", "fig4", "fig5", "fig6", "fig7"]
    with pytest.raises(ConfigError):
        config.preset_config("fig9")
