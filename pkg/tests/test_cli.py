import json
import subprocess
import sys

import numpy as np
import pytest

from cogrelay.channel import SystemConfig, sample_network
from cogrelay.cli import default_config_text, load_config, run
from cogrelay.experiments import SweepSpec, run_sweep, table_to_csv
from cogrelay.experiments import solve_link


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_default_config_round_trips(tmp_path):
    path = write(tmp_path, "d.toml", default_config_text())
    cfg, sweep = load_config(path)
    assert cfg == SystemConfig()
    assert sweep == {"seed": 0}


def test_print_default_config(capsys):
    assert run(["--print-default-config"]) == 0
    out = capsys.readouterr().out
    assert "n_total = 6" in out and "eps2 = 0.0001" in out


def test_missing_config_names_path(capsys):
    assert run(["outage", "--config", "/no/such/file.toml"]) == 1
    assert "/no/such/file.toml" in capsys.readouterr().err


@pytest.mark.parametrize("text, needle", [
    ("[system]\nn_total = 5\n", "n_total"),
    ("[system]\neps2 = -1.0\n", "system.eps2"),
    ("[system]\nantennas = 3\n", "system.antennas"),
    ("[sweep]\nschemes = [\"XX\"]\n", "sweep.schemes"),
    ("[sweep]\nfoo = 1\n", "sweep.foo"),
    ("[other]\n", "other"),
    ("[system\n", "not valid TOML"),
])
def test_validation_errors(tmp_path, capsys, text, needle):
    path = write(tmp_path, "bad.toml", text)
    assert run(["sweep-power", "--config", path, "--trials", "1"]) == 1
    assert needle in capsys.readouterr().err


def test_bad_flag_is_validation_error(capsys):
    assert run(["sweep-power", "--trials", "zero"]) == 1
    assert run(["sweep-power", "--trials", "0"]) == 1
    assert run([]) == 1


def test_solve_canonical_gamma1_zero(tmp_path, capsys):
    doc = {"h1": [[1, 0], [0, 1]], "h2": [[0.5, 0], [0, -1]], "c": 1.0, "gamma1": 0.0,
           "p_total": 4.0}
    path = write(tmp_path, "p.json", json.dumps(doc))
    assert run(["solve-canonical", "--input", path]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["gamma2"] == pytest.approx(4.0 * 1.25)


def test_solve_canonical_infeasible_and_missing(tmp_path, capsys):
    doc = {"h1": [[1, 0]], "h2": [[1, 0]], "gamma1": 50.0, "p_total": 1.0}
    path = write(tmp_path, "p.json", json.dumps(doc))
    assert run(["solve-canonical", "--input", path]) == 0
    assert json.loads(capsys.readouterr().out)["feasible"] is False
    assert run(["solve-canonical", "--input", str(tmp_path / "none.json")]) == 1


def test_solve_instance_exit_codes(tmp_path, capsys):
    assert run(["solve-instance", "--scheme", "FD-DF", "--seed", "3"]) == 0
    doc = json.loads(capsys.readouterr().out)
    ref = solve_link(sample_network(SystemConfig(), 3), SystemConfig(), "FD-DF")
    assert doc["r_cu"] == ref.r_cu and doc["feasible"]
    ch = sample_network(SystemConfig(), 3)
    ch = ch.replace(g=np.zeros_like(ch.g))
    path = write(tmp_path, "ch.json", ch.to_json())
    assert run(["solve-instance", "--scheme", "HD-DF", "--channels", path]) == 2
    assert json.loads(capsys.readouterr().out)["feasible"] is False


def test_sweep_matches_library(tmp_path):
    cfg_path = write(tmp_path, "c.toml",
                     "[system]\npc_db = 15.0\n[sweep]\nvalues = [5.0, 10.0]\n"
                     "schemes = [\"HD-DF\", \"FD-DF\"]\n")
    out = tmp_path / "s.csv"
    assert run(["sweep-power", "--config", cfg_path, "--trials", "4", "--seed", "9",
                "--out", str(out)]) == 0
    spec = SweepSpec("pc_db", [5.0, 10.0], ["HD-DF", "FD-DF"], 4, 9)
    assert out.read_text() == table_to_csv(run_sweep(SystemConfig(pc_db=15.0), spec))
    assert json.loads((tmp_path / "s.csv.json").read_text())["config"]["pc_db"] == 15.0


@pytest.mark.parametrize("cmd", ["sweep-noise", "outage", "antenna-config", "rate-region"])
def test_subcommands_run(tmp_path, cmd):
    cfg_path = write(tmp_path, "c.toml", "[sweep]\nn_points = 5\n" if cmd == "rate-region"
                     else "[sweep]\n")
    out = tmp_path / f"{cmd}.csv"
    assert run([cmd, "--config", cfg_path, "--trials", "2", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "variable,value,scheme,metric,mean,stderr,n_trials,seed"
    assert len(lines) > 1


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "cogrelay", "--print-default-config"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "[system]" in res.stdout
