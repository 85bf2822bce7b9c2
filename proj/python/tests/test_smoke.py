import json
import math
import os
import subprocess

import pytest

import pilot_borrow as pb

CLI = os.environ.get("PILOT_BORROW_CLI")
needs_cli = pytest.mark.skipif(not CLI, reason="PILOT_BORROW_CLI not set")

SMALL_GRID = {
    "scenarios": [{"p_C": 0.25, "rr": 1.7, "pilot_fraction": 0.2}],
    "replicates": 200,
    "master_seed": 11,
    "search": {"n_lo": 20, "n_hi": 2000},
}


def test_special_functions():
    assert pb.reg_inc_beta(0.5, 2.0, 2.0) == pytest.approx(0.5)
    assert pb.reg_inc_beta(0.3, 1.0, 1.0) == pytest.approx(0.3)
    assert pb.log_gamma(5.0) == pytest.approx(math.log(24.0))
    with pytest.raises(ValueError):
        pb.reg_inc_beta(1.5, 2.0, 2.0)


def test_prior_and_posterior():
    prior = pb.build_robust_map(pb.ArmCounts(5, 20))
    assert len(prior) == 2
    post = pb.update_posterior(prior, pb.ArmCounts(25, 100))
    w = pb.informative_weight(post)
    assert 0.0 < w < 1.0
    with pytest.raises(ValueError):
        pb.ArmCounts(21, 20)


def test_exceedance_and_decision():
    t = pb.BetaParams(31, 91)
    c = pb.BetaParams(26, 76)
    p = pb.beta_exceedance(t, c)
    assert p + pb.beta_exceedance(c, t) == pytest.approx(1.0, abs=1e-9)
    assert pb.decide(0.99)
    assert not pb.decide(0.975)


def test_power_is_reproducible():
    s = pb.DesignScenario(0.25, 1.7, replicates=300, master_seed=3)
    a = pb.estimate_power(s, 230)
    b = pb.estimate_power(s, 230, workers=2)
    assert a.power == b.power
    assert a.replicates == 300


def test_parse_config_errors():
    with pytest.raises(ValueError):
        pb.parse_config("{")
    with pytest.raises(ValueError):
        pb.parse_config(json.dumps({**SMALL_GRID, "phi": 1.5}))
    canon = json.loads(pb.parse_config(json.dumps(SMALL_GRID)))
    assert canon["replicates"] == 200


def test_run_grid_csv():
    csv = pb.run_grid_csv(json.dumps(SMALL_GRID))
    lines = csv.strip().splitlines()
    assert len(lines) == 2
    assert "p_C" in lines[0]


def run_cli(*args, env_seed=None, cwd=None):
    env = dict(os.environ)
    env.pop("PILOT_BORROW_SEED", None)
    if env_seed is not None:
        env["PILOT_BORROW_SEED"] = str(env_seed)
    return subprocess.run([CLI, *args], capture_output=True, text=True, env=env, cwd=cwd)


@needs_cli
def test_cli_power_and_seed_precedence():
    base = ["power", "--n", "100", "--replicates", "200"]
    r = run_cli(*base)
    assert r.returncode == 0
    assert "seed=20240917" in r.stdout
    r = run_cli(*base, env_seed=77)
    assert "seed=77" in r.stdout
    r = run_cli(*base, "--seed", "5", env_seed=77)
    assert "seed=5" in r.stdout


@needs_cli
def test_cli_power_defaults_to_no_pilot():
    a = run_cli("power", "--n", "120", "--replicates", "300")
    b = run_cli("power", "--n", "120", "--replicates", "300", "--pilot-fraction", "0")
    assert a.stdout == b.stdout


@needs_cli
def test_cli_duration_and_recruit():
    r = run_cli("duration", "--n", "846")
    assert r.returncode == 0
    assert "85" in r.stdout
    r = run_cli("recruit", "--n", "230", "--months", "46")
    assert r.returncode == 0


@needs_cli
def test_cli_exit_codes(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({**SMALL_GRID, "phi": 1.5}))
    assert run_cli("grid", "--config", str(bad), cwd=tmp_path).returncode == 1

    good = tmp_path / "good.json"
    good.write_text(json.dumps(SMALL_GRID))
    out = tmp_path / "out.csv"
    assert run_cli("grid", "--config", str(good), "--out", str(out)).returncode == 0
    assert out.read_text().startswith("p_C")

    missing_dir = tmp_path / "no" / "such" / "dir" / "out.csv"
    assert run_cli("grid", "--config", str(good), "--out", str(missing_dir)).returncode == 2

    hopeless = tmp_path / "hopeless.json"
    hopeless.write_text(json.dumps({**SMALL_GRID, "scenarios": [{"p_C": 0.06, "rr": 1.3}],
                                    "search": {"n_lo": 20, "n_hi": 60}}))
    assert run_cli("grid", "--config", str(hopeless), cwd=tmp_path).returncode == 3

    assert run_cli("power").returncode == 1
