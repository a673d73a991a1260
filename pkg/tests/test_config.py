"""Config parsing: defaults, validation errors, YAML round trips."""
import pytest

from bvflux import ConfigError, build_problem, load_config, parse_config
from bvflux.config import DEFAULT_SEED


def minimal_reference():
    return {"reference": "paper-ex2", "m_cells": 50, "t_final": 6.0}


def minimal_flux():
    return {
        "flux": {"family": "quadratic-shift",
                 "breakpoints": [0.0], "values": [1.0, 0.0]},
        "initial_data": {"constant": 0.5},
        "domain": {"x_left": -1.0, "x_right": 1.0},
        "m_cells": [20, 40],
        "t_final": 0.25,
    }


# ---------------------------------------------------------------------------
# happy paths
# ---------------------------------------------------------------------------

def test_minimal_reference_defaults():
    cfg = parse_config(minimal_reference())
    assert cfg.reference == "paper-ex2"
    assert cfg.m_cells == (50,)
    assert cfg.t_final == 6.0
    assert cfg.cfl_safety == 0.9
    assert cfg.lam is None
    assert cfg.flux is None and cfg.initial_data is None
    assert cfg.snapshot_times == ()
    assert cfg.partition_min_width == 0.0
    assert cfg.out_dir == "out" and cfg.formats == ("csv",)
    assert cfg.seed == DEFAULT_SEED and cfg.threads == 1


def test_full_flux_config_round_trip():
    raw = minimal_flux()
    raw.update({
        "cfl_safety": 0.8,
        "snapshot_times": [0.0, 0.1, 0.25],
        "partition_min_width": 0.01,
        "outputs": {"directory": "results", "formats": ["csv", "plots"]},
        "seed": 7,
        "threads": 2,
    })
    cfg = parse_config(raw)
    assert cfg.flux["family"] == "quadratic-shift"
    assert cfg.flux["breakpoints"] == (0.0,)
    assert cfg.flux["values"] == (1.0, 0.0)
    assert cfg.initial_data == {"constant": 0.5}
    assert cfg.x_left == -1.0 and cfg.x_right == 1.0
    assert cfg.m_cells == (20, 40)
    assert cfg.snapshot_times == (0.0, 0.1, 0.25)
    assert cfg.out_dir == "results"
    assert cfg.formats == ("csv", "plots")
    assert cfg.seed == 7 and cfg.threads == 2
    echo = cfg.echo()
    assert echo["outputs"]["directory"] == "results"
    assert echo["m_cells"] == [20, 40]


def test_reference_with_explicit_lambda():
    raw = minimal_reference()
    raw["lam"] = 0.45
    assert parse_config(raw).lam == 0.45


def test_initial_data_table_parses():
    raw = minimal_flux()
    raw["initial_data"] = {"breakpoints": [0.0], "values": [1.0, 0.0]}
    cfg = parse_config(raw)
    assert cfg.initial_data == {"breakpoints": (0.0,), "values": (1.0, 0.0)}


def test_yaml_file_round_trip(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text(
        "reference: paper-ex1\n"
        "m_cells: [50, 100]\n"
        "t_final: 1.0\n"
        "snapshot_times: [0.0, 0.5, 1.0]\n",
        encoding="utf-8")
    cfg = load_config(str(path))
    assert cfg.reference == "paper-ex1"
    assert cfg.m_cells == (50, 100)
    assert cfg.snapshot_times == (0.0, 0.5, 1.0)


# ---------------------------------------------------------------------------
# rejection paths
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("mutate,fragment", [
    (lambda r: r.pop("t_final"), "t_final"),
    (lambda r: r.update(t_final=0.0), "t_final"),
    (lambda r: r.update(m_cells=1), "m_cells"),
    (lambda r: r.update(m_cells=[])," m_cells list"),
    (lambda r: r.update(m_cells=[50, 1]), "m_cells"),
    (lambda r: r.update(cfl_safety=0.0), "cfl_safety"),
    (lambda r: r.update(cfl_safety=1.5), "cfl_safety"),
    (lambda r: r.update(lam=-0.1), "lam"),
    (lambda r: r.update(snapshot_times=[3.0, 1.0]), "sorted"),
    (lambda r: r.update(snapshot_times=[7.0]), "outside"),
    (lambda r: r.update(partition_min_width=-1.0), "partition_min_width"),
    (lambda r: r.update(typo_key=1), "unknown key"),
    (lambda r: r.update(seed="abc"), "seed"),
    (lambda r: r.update(threads=0), "threads"),
    (lambda r: r.update(outputs={"formats": ["bmp"]}), "format"),
    (lambda r: r.update(outputs={"formats": []}), "formats"),
])
def test_reference_config_rejections(mutate, fragment):
    raw = minimal_reference()
    mutate(raw)
    with pytest.raises(ConfigError, match=fragment.strip()):
        parse_config(raw)


def test_flux_config_requires_family_and_paired_tables():
    raw = minimal_flux()
    del raw["flux"]["family"]
    with pytest.raises(ConfigError, match="family"):
        parse_config(raw)
    raw = minimal_flux()
    del raw["flux"]["values"]
    with pytest.raises(ConfigError, match="breakpoints and values"):
        parse_config(raw)


def test_non_reference_config_needs_domain_and_initial_data():
    raw = minimal_flux()
    del raw["domain"]
    with pytest.raises(ConfigError, match="domain"):
        parse_config(raw)
    raw = minimal_flux()
    del raw["initial_data"]
    with pytest.raises(ConfigError, match="initial_data"):
        parse_config(raw)


def test_initial_data_needs_exactly_one_kind():
    raw = minimal_flux()
    raw["initial_data"] = {"constant": 1.0, "builtin": "paper-ex1"}
    with pytest.raises(ConfigError, match="exactly one"):
        parse_config(raw)


def test_domain_ordering_enforced():
    raw = minimal_flux()
    raw["domain"] = {"x_left": 1.0, "x_right": -1.0}
    with pytest.raises(ConfigError, match="x_left < x_right"):
        parse_config(raw)


def test_config_root_must_be_mapping():
    with pytest.raises(ConfigError, match="mapping"):
        parse_config(["not", "a", "mapping"])


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(str(tmp_path / "missing.yaml"))


def test_load_config_malformed_yaml(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("reference: [unclosed\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="cannot parse"):
        load_config(str(path))


def test_build_problem_rejects_reference_plus_flux():
    raw = minimal_reference()
    cfg = parse_config(raw)
    cfg.flux = {"family": "quadratic-shift", "breakpoints": (0.0,),
                "values": (1.0, 0.0)}
    with pytest.raises(ConfigError, match="either"):
        build_problem(cfg)


def test_build_problem_unknown_reference():
    cfg = parse_config(minimal_reference())
    cfg.reference = "paper-ex9"
    with pytest.raises(ConfigError, match="unknown reference"):
        build_problem(cfg)
