import json
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fepnet.cli import main
from fepnet.config import (ExperimentConfig, KernelParams, config_from_dict, emit_config,
                           parse_config)
from fepnet.errors import ConfigError, RunError
from fepnet.growth import GrowthConfig
from fepnet.harness import emit_summary, run_experiment
from fepnet.io import read_csv

GROW = {"mode": "grow", "seed": 3, "replicates": 2, "parallelism": 1,
        "growth": {"n_final": 3000, "kernel": "phenomenological"}}


def _write(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return p


def primary_files(root: Path) -> dict:
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*"))
            if p.is_file() and p.name not in ("run.json", "manifest.json")}


def test_minimal_grow_config_gets_defaults(tmp_path):
    cfg = parse_config(_write(tmp_path, {"mode": "grow", "growth": {"n_final": 100}}))
    assert cfg.growth == GrowthConfig(100, 1, 3, "linear-BA")
    assert cfg.kernel == KernelParams()
    assert (cfg.seed, cfg.replicates, cfg.out_dir) == (0, 1, "out")


def test_link_range_above_sense_range_names_both():
    with pytest.raises(ConfigError) as exc:
        config_from_dict({"mode": "simulate", "world": {"link_range": 6, "sense_range": 5}})
    assert any("link_range" in p and "sense_range" in p for p in exc.value.problems)


def test_unknown_key_suggests_nearest():
    with pytest.raises(ConfigError, match="did you mean 'k_max'"):
        config_from_dict({"mode": "kernel-table", "kernel": {"kmax": 10}})


def test_all_problems_reported():
    with pytest.raises(ConfigError) as exc:
        config_from_dict({"mode": "grow", "replicates": 0, "sedd": 1,
                          "growth": {"n_final": "many", "m_link": 2}})
    text = " | ".join(exc.value.problems)
    for needle in ("replicates", "'sedd'", "'seed'", "n_final", "'growth.m_link'"):
        assert needle in text
    assert len(exc.value.problems) >= 4


def test_mode_requirements():
    with pytest.raises(ConfigError, match="requires a 'growth'"):
        config_from_dict({"mode": "grow"})
    with pytest.raises(ConfigError, match="analyze.input"):
        config_from_dict({"mode": "analyze", "analyze": {}})
    with pytest.raises(ConfigError, match="mode is required"):
        config_from_dict({})
    with pytest.raises(ConfigError, match="mode must be one of"):
        config_from_dict({"mode": "fly"})


def test_kernel_scales_checked_when_used():
    with pytest.raises(ConfigError, match="d_noise"):
        config_from_dict({"mode": "kernel-table", "kernel": {"eta": 500.0}})


def test_sweep_validation():
    bad = {"mode": "sweep", "growth": {"n_final": 100},
           "sweep": {"parameter": "kernel.nuu", "values": [1]}}
    with pytest.raises(ConfigError, match="'nu'"):
        config_from_dict(bad)
    with pytest.raises(ConfigError, match="non-empty"):
        config_from_dict({**bad, "sweep": {"parameter": "kernel.nu", "values": []}})


def test_bad_file(tmp_path):
    with pytest.raises(ConfigError):
        parse_config(tmp_path / "missing.json")
    p = tmp_path / "broken.json"
    p.write_text("{")
    with pytest.raises(ConfigError, match="invalid JSON"):
        parse_config(p)


configs = st.builds(
    dict,
    mode=st.sampled_from(["grow", "grow-ba", "sweep"]),
    seed=st.integers(0, 2 ** 64 - 1),
    replicates=st.integers(1, 5),
    growth=st.builds(dict, n_final=st.integers(10, 10 ** 6), m_links=st.integers(1, 3),
                     kernel=st.sampled_from(["linear-BA", "uniform", "phenomenological"])),
    kernel=st.builds(dict, nu=st.floats(0.5, 3), alpha=st.floats(0.5, 2), var_d=st.integers(1, 3)),
    sweep=st.builds(dict, parameter=st.just("kernel.nu"),
                    values=st.lists(st.floats(0.5, 3), min_size=1, max_size=3)),
)


@given(configs)
def test_round_trip(raw):
    cfg = config_from_dict(raw)
    again = config_from_dict(json.loads(emit_config(cfg)))
    assert again == cfg


def test_round_trip_world_and_analyze():
    cfg = config_from_dict({"mode": "simulate", "world": {"k_max": 4, "update_order": "sequential"},
                            "analyze": {"input": "x.edges"}})
    assert config_from_dict(json.loads(emit_config(cfg))) == cfg


def test_replicates_are_byte_identical(tmp_path):
    cfg = config_from_dict(GROW)
    recs = run_experiment(cfg, tmp_path / "a")
    run_experiment(cfg, tmp_path / "b")
    assert [r.seed for r in recs] == [3, 2]
    a, b = primary_files(tmp_path / "a"), primary_files(tmp_path / "b")
    assert a == b and len(a) == 6
    manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
    for run in manifest["runs"]:
        assert all((tmp_path / "a" / f).exists() for f in run["files"])


def test_analyze_growth_output(tmp_path):
    run_experiment(config_from_dict(GROW), tmp_path / "g")
    cfg = config_from_dict({"mode": "analyze", "analyze": {"input": str(tmp_path / "g" / "run_000" / "graph.edges")}})
    run_experiment(cfg, tmp_path / "a")
    report = json.loads((tmp_path / "a" / "run_000" / "fit.json").read_text())
    assert report["n_nodes"] == 3000
    assert {"gamma_deg", "k_min", "ks", "k_knee", "confidence", "exp_rate"} <= set(report)
    assert report == json.loads((tmp_path / "g" / "run_000" / "fit.json").read_text())


def test_sweep_writes_runs_and_summary(tmp_path):
    cfg = config_from_dict({"mode": "sweep", "parallelism": 1,
                            "growth": {"n_final": 3000, "kernel": "phenomenological"},
                            "sweep": {"parameter": "kernel.nu", "values": [1.0, 1.5, 2.0]}})
    run_experiment(cfg, tmp_path)
    dirs = sorted(p.name for p in tmp_path.iterdir() if p.is_dir())
    assert dirs == ["run_000_nu=1", "run_001_nu=1.5", "run_002_nu=2"]
    rows = read_csv(tmp_path / "summary.csv")
    assert [r["kernel.nu"] for r in rows] == ["1.0", "1.5", "2.0"]
    for col in ("gamma_deg", "k_knee", "confidence", "min_degree_fraction", "ks_vs_ba"):
        assert col in rows[0]


def test_emit_summary(tmp_path):
    p = emit_summary([{"kernel.nu": 1.5, "gamma_deg": 2.9}], tmp_path / "one.csv")
    assert p.read_text().splitlines() == ["kernel.nu,gamma_deg", "1.5,2.9"]
    p = emit_summary([{"kernel.nu": 1.5, "k_knee": 40}, {"growth.m_links": 2, "k_knee": 30}],
                     tmp_path / "two.csv")
    assert p.read_text().splitlines() == ["kernel.nu,growth.m_links,k_knee", "1.5,,40", ",2,30"]
    with pytest.raises(ValueError):
        emit_summary([], tmp_path / "none.csv")


def test_failures_carry_replicate_and_seed(tmp_path):
    cfg = config_from_dict({"mode": "analyze", "seed": 77, "analyze": {"input": str(tmp_path / "nope")}})
    with pytest.raises(RunError, match=r"replicate 0 \(seed 77\)"):
        run_experiment(cfg, tmp_path / "out")


def test_parallel_pool_matches_serial(tmp_path):
    cfg = config_from_dict({**GROW, "parallelism": 2})
    run_experiment(cfg, tmp_path / "p")
    run_experiment(config_from_dict(GROW), tmp_path / "s")
    assert primary_files(tmp_path / "p") == primary_files(tmp_path / "s")


def test_cli_exit_codes(tmp_path, capsys):
    good = _write(tmp_path, {"mode": "kernel-table", "d_max": 60}, "k.json")
    assert main(["kernel-table", "--config", str(good), "--out", str(tmp_path / "k")]) == 0
    header = (tmp_path / "k" / "run_000" / "kernel_table.csv").read_text().splitlines()[0]
    assert header == "d,mechanistic,phenomenological,regime,local_slope"
    bad = _write(tmp_path, {"mode": "kernel-table", "kernel": {"kmax": 3}}, "bad.json")
    assert main(["kernel-table", "--config", str(bad)]) == 1
    assert "k_max" in capsys.readouterr().err
    assert main(["grow", "--config", str(good)]) == 1
    broken = _write(tmp_path, {"mode": "analyze", "analyze": {"input": str(tmp_path / "nope")}}, "a.json")
    assert main(["analyze", "--config", str(broken), "--out", str(tmp_path / "a")]) == 2


def test_cli_seed_override(tmp_path):
    cfg = _write(tmp_path, {**GROW, "replicates": 1})
    main(["grow", "--config", str(cfg), "--out", str(tmp_path / "x"), "--seed", "11"])
    run = json.loads((tmp_path / "x" / "run_000" / "run.json").read_text())
    assert run["seed"] == 11
