import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nhbdi.exceptions import ConfigError
from nhbdi.rates import RateFunction
from nhbdi.scenario import (
    PRESETS,
    Scenario,
    dump_scenario,
    homogeneous,
    load_scenario,
    parse_scenario,
    preset_path,
    running_example,
    scenario_to_dict,
)

SCHEMA_EXAMPLE = {
    "lambda": {"segments": [
        {"t_start": 0, "t_end": 50, "shape": "constant", "level": 0.3},
        {"t_start": 50, "t_end": 60, "shape": "raised_cosine", "from": 0.3, "to": 0.06},
        {"t_start": 60, "shape": "constant", "level": 0.06},
    ]},
    "mu": {"segments": [{"t_start": 0, "shape": "constant", "level": 0.1}]},
    "nu": {"segments": [{"t_start": 0, "shape": "constant", "level": 0.0}]},
    "i0": 1, "t_end": 500, "dt": 0.01, "k_max": 400000, "replications": 100000, "seed": 20210122,
}


def test_schema_example_parses_to_running_example():
    assert parse_scenario(SCHEMA_EXAMPLE) == running_example(10.0)


@pytest.mark.parametrize("name", PRESETS)
def test_presets_load(name):
    sc = load_scenario(preset_path(name))
    assert isinstance(sc, Scenario)
    assert load_scenario(name) == sc


def test_preset_delays():
    for d in (0, 5, 10):
        assert load_scenario(f"running_example_d{d}") == running_example(float(d))
    assert load_scenario("running_example_bdi") == running_example(10.0, nu0=0.2)


@pytest.mark.parametrize("suffix", [".toml", ".json"])
def test_round_trip(tmp_path, suffix):
    sc = running_example(5.0, nu0=0.2, i0=3, t_end=123.5, dt=0.02, k_max=1000, replications=7, master_seed=99)
    path = dump_scenario(sc, tmp_path / f"s{suffix}")
    assert load_scenario(path) == sc


@settings(max_examples=40, deadline=None)
@given(
    lam=st.floats(0, 3), mu=st.floats(0, 3), nu=st.floats(0, 3),
    i0=st.integers(0, 50), delay=st.one_of(st.just(0.0), st.floats(0.01, 20)), seed=st.integers(0, 2**64 - 1),
)
def test_round_trip_property(tmp_path_factory, lam, mu, nu, i0, delay, seed):
    sc = Scenario(
        lam=RateFunction.step(lam, lam / 2, 30.0, delay), mu=RateFunction.constant(mu),
        nu=RateFunction.constant(nu), i0=i0, k_max=max(i0, 1), master_seed=seed,
    )
    d = tmp_path_factory.mktemp("rt")
    for suffix in (".toml", ".json"):
        assert load_scenario(dump_scenario(sc, d / f"x{suffix}")) == sc


def test_unknown_keys_rejected():
    bad = dict(SCHEMA_EXAMPLE, lamda=1)
    with pytest.raises(ConfigError, match="lamda"):
        parse_scenario(bad)
    seg = json.loads(json.dumps(SCHEMA_EXAMPLE))
    seg["mu"]["segments"][0]["levle"] = 0.1
    with pytest.raises(ConfigError, match="levle"):
        parse_scenario(seg)


def test_missing_and_bad_values():
    d = dict(SCHEMA_EXAMPLE)
    del d["i0"]
    with pytest.raises(ConfigError, match="i0"):
        parse_scenario(d)
    with pytest.raises(ConfigError):
        parse_scenario(dict(SCHEMA_EXAMPLE, i0="one"))
    with pytest.raises(ConfigError):
        parse_scenario(dict(SCHEMA_EXAMPLE, i0=1.5))
    with pytest.raises(ConfigError):
        parse_scenario(dict(SCHEMA_EXAMPLE, dt=0.0))
    with pytest.raises(ConfigError):
        parse_scenario(dict(SCHEMA_EXAMPLE, t_end=1e6, dt=0.01))
    with pytest.raises(ConfigError):
        parse_scenario(dict(SCHEMA_EXAMPLE, i0=10, k_max=5))


def test_malformed_json_reports_position(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{\n  "i0": 1,\n  "mu": \n}\n')
    with pytest.raises(ConfigError, match=r"bad\.json:4:1"):
        load_scenario(p)


def test_malformed_toml_reports_position(tmp_path):
    p = tmp_path / "bad.toml"
    p.write_text("i0 = 1\nmu = [\n")
    with pytest.raises(ConfigError, match=r"bad\.toml:3:1"):
        load_scenario(p)


def test_unsupported_extension(tmp_path):
    p = tmp_path / "s.yaml"
    p.write_text("i0: 1")
    with pytest.raises(ConfigError):
        load_scenario(p)
    with pytest.raises(ConfigError):
        dump_scenario(homogeneous(0.1, 0.1), tmp_path / "s.yaml")


def test_overrides():
    sc = running_example(10.0)
    sc2 = sc.with_overrides(t_end=100.0, delay_d=5.0, master_seed=None)
    assert sc2.t_end == 100.0 and sc2.master_seed == sc.master_seed
    assert sc2.lam == RateFunction.step(0.3, 0.06, 50.0, 5.0)
    assert scenario_to_dict(sc)["seed"] == 20210122
