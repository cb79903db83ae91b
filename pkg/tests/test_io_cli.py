import json

import numpy as np
import pytest

from nskdecay import cli
from nskdecay.io import (
    HEADER,
    RunManifest,
    read_state,
    state_to_csv,
    write_energy_csv,
    write_json,
    write_series_csv,
    write_state,
)
from nskdecay.decay import DecaySeries
from nskdecay.nonlinear import EnergyRecord
from nskdecay.spectral import Grid, State

SMALL_LINEAR = {
    "params": {"mu": 1.0, "mu_prime": 0.0, "kappa": 0.25, "n": 2},
    "grid": {"N": 64, "L": 64.0},
    "run": {"T": 12.0, "samples": 16, "t_start": 1.0, "window": [2.0, 11.0],
            "ic": {"kind": "bump_pair", "width": 3.0}},
    "seed": 0,
}


def _state(grid, seed=0):
    rng = np.random.default_rng(seed)
    return State(grid, rng.standard_normal(grid.shape), rng.standard_normal((grid.n,) + grid.shape))


@pytest.mark.parametrize("n, N", [(2, 16), (3, 8)])
def test_binary_round_trip_is_exact(tmp_path, n, N):
    st = _state(Grid(n, N, 12.5))
    path = write_state(tmp_path / "s.bin", st)
    assert path.stat().st_size == HEADER.size + (1 + n) * N ** n * 8
    back = read_state(path)
    assert back.grid == st.grid
    np.testing.assert_array_equal(back.phi, st.phi)
    np.testing.assert_array_equal(back.m, st.m)


def test_truncated_binary_is_rejected(tmp_path):
    path = write_state(tmp_path / "s.bin", _state(Grid(2, 8, 1.0)))
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(ValueError, match="payload"):
        read_state(path)


def test_csv_exports(tmp_path):
    g = Grid(2, 8, 2.0)
    st = _state(g)
    lines = state_to_csv(tmp_path / "s.csv", st).read_text().splitlines()
    assert lines[0] == "x1,x2,phi,m1,m2" and len(lines) == 65
    row = [float(v) for v in lines[1].split(",")]
    assert row[2] == st.phi.ravel()[0]  # repr round-trips exactly
    with pytest.raises(ValueError, match="limited"):
        state_to_csv(tmp_path / "big.csv", State.zeros(Grid(3, 64, 1.0)))
    s = write_series_csv(tmp_path / "series.csv", DecaySeries("q", [1.0, 2.0], [0.5, 0.25]))
    assert s.read_text() == "t,value\n1.0,0.5\n2.0,0.25\n"
    e = write_energy_csv(tmp_path / "e.csv", [EnergyRecord(0.0, 2.0, 1.0)])
    assert e.read_text().splitlines()[1] == "0.0,2.0,1.0"


def test_json_handles_numpy(tmp_path):
    p = write_json(tmp_path / "r.json", {"b": np.float64(1.5), "a": np.arange(3)})
    assert json.loads(p.read_text()) == {"a": [0, 1, 2], "b": 1.5}


def test_manifest_lists_files(tmp_path):
    man = RunManifest("kernel", None, tmp_path / "out", 3)
    man.write()
    man.add(tmp_path / "out" / "x.csv")
    man.finalize("passed")
    data = json.loads(man.path.read_text())
    assert data["files"] == ["manifest.json", "x.csv"]
    assert data["status"] == "passed" and data["seed"] == 3


# ---------------------------------------------------------------- command line


def _write_cfg(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def test_missing_required_field_exits_with_config_error(tmp_path, capsys):
    cfg = json.loads(json.dumps(SMALL_LINEAR))
    del cfg["grid"]["N"]
    code = cli.main(["linear-decay", "--config", _write_cfg(tmp_path, cfg), "--out", str(tmp_path / "o")])
    assert code == cli.EXIT_CONFIG
    assert "grid.N" in capsys.readouterr().err
    assert not (tmp_path / "o").exists()


def test_invalid_parameters_exit_with_config_error(tmp_path, capsys):
    cfg = json.loads(json.dumps(SMALL_LINEAR))
    cfg["params"]["mu"] = -1.0
    code = cli.main(["linear-decay", "--config", _write_cfg(tmp_path, cfg), "--out", str(tmp_path / "o")])
    assert code == cli.EXIT_CONFIG
    assert "mu > 0" in capsys.readouterr().err


def test_malformed_json_reports_line_and_column(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{\n  "params": {"mu": 1.0,,}\n}')
    assert cli.main(["kernel", "--config", str(p), "--out", str(tmp_path / "o")]) == cli.EXIT_CONFIG
    assert "line 2, column" in capsys.readouterr().err


def test_unrepresentable_grid_is_a_config_error(tmp_path):
    cfg = json.loads(json.dumps(SMALL_LINEAR))
    cfg["grid"]["L"] = 400.0
    code = cli.main(["linear-decay", "--config", _write_cfg(tmp_path, cfg), "--out", str(tmp_path / "o")])
    assert code == cli.EXIT_CONFIG


def test_dry_run_writes_manifest_only(tmp_path):
    out = tmp_path / "o"
    code = cli.main(["linear-decay", "--config", _write_cfg(tmp_path, SMALL_LINEAR), "--out", str(out),
                     "--dry-run"])
    assert code == cli.EXIT_OK
    assert sorted(p.name for p in out.iterdir()) == ["manifest.json"]
    assert json.loads((out / "manifest.json").read_text())["status"] == "dry-run"


def test_horizon_violation_is_a_runtime_error(tmp_path):
    cfg = json.loads(json.dumps(SMALL_LINEAR))
    cfg["run"]["T"] = 40.0
    code = cli.main(["linear-decay", "--config", _write_cfg(tmp_path, cfg), "--out", str(tmp_path / "o")])
    assert code == cli.EXIT_RUNTIME


def test_linear_run_is_deterministic(tmp_path):
    cfgp = _write_cfg(tmp_path, SMALL_LINEAR)
    outs = [tmp_path / "a", tmp_path / "b"]
    codes = [cli.main(["linear-decay", "--config", cfgp, "--out", str(o), "--threads", "1"]) for o in outs]
    assert codes[0] == codes[1]
    files = sorted(p.name for p in outs[0].glob("*.csv"))
    assert "checks.csv" in files and "series_phi_low_Linf.csv" in files
    for name in files:
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()
    report = json.loads((outs[0] / "report.json").read_text())
    assert report["effective_config"]["threads"] == 1
    manifest = json.loads((outs[0] / "manifest.json").read_text())
    assert set(files) <= set(manifest["files"])


def test_modecheck_command(tmp_path):
    cfg = {"run": {"samples": 300, "n": 2}, "seed": 5}
    out = tmp_path / "o"
    assert cli.main(["modecheck", "--config", _write_cfg(tmp_path, cfg), "--out", str(out)]) == cli.EXIT_OK
    report = json.loads((out / "report.json").read_text())
    assert report["passed"] and report["samples"] == 300 and report["seed"] == 5


def test_seed_flag_overrides_config(tmp_path):
    cfg = {"run": {"samples": 50, "n": 3}, "seed": 5}
    out = tmp_path / "o"
    cli.main(["modecheck", "--config", _write_cfg(tmp_path, cfg), "--out", str(out), "--seed", "9"])
    assert json.loads((out / "report.json").read_text())["seed"] == 9
