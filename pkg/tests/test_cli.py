"""Config parsing and the command-line entry point."""

import numpy as np
import pytest

from roughcontrol import cli
from roughcontrol.config import (ExperimentConfig, emit_config, load_config,
                                 parse_config)
from roughcontrol.errors import ConfigError


def test_config_defaults_are_valid():
    ExperimentConfig().validate()


def test_config_parse_and_emit_round_trip():
    text = """
    # experiment settings
    problem = execution
    hurst = 0.0625, 0.5
    level = 1, 2, 3
    dt = 0.01
    seed = 7
    """
    config = parse_config(text)
    assert config.problem == "execution"
    assert config.hurst == [0.0625, 0.5]
    assert config.level == [1, 2, 3]
    emitted = emit_config(config)
    assert parse_config(emitted) == config
    # canonical emission is idempotent
    assert emit_config(parse_config(emitted)) == emitted


def test_unknown_key_rejected():
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config("fiddle = 3\n")


def test_invalid_values_rejected():
    with pytest.raises(ConfigError):
        parse_config("dt = 0.013\n")  # does not divide the horizon
    with pytest.raises(ConfigError):
        parse_config("hurst = 1.5\n")
    with pytest.raises(ConfigError):
        parse_config("problem = trackingg\n")
    with pytest.raises(ConfigError):
        parse_config("dt\n")


def test_main_exit_code_for_bad_config(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("unknown_key = 1\n")
    assert cli.main(["benchmark", "--config", str(bad)]) == 2
    assert cli.main(["benchmark", "--config", str(tmp_path / "none.cfg")]) == 2


def test_benchmark_outputs(tmp_path, capsys):
    out = tmp_path / "twap.csv"
    assert cli.main(["benchmark", "--problem", "execution",
                     "--out", str(out)]) == 0
    rows = out.read_text().splitlines()
    assert rows[0].startswith("problem,hurst,quantity,value")
    value = float(rows[2].split(",")[3])
    assert 0.9989 <= value <= 0.9991


def test_run_is_byte_reproducible(tmp_path):
    args = ["run", "--problem", "tracking", "--policy", "linear",
            "--N", "1", "--H", "0.5", "--dt", "0.1", "--n-train", "64",
            "--n-test", "64", "--n-steps", "5", "--batch-size", "32",
            "--seed", "7"]
    outputs = []
    for name in ("a.csv", "b.csv"):
        target = tmp_path / name
        assert cli.main(args + ["--out", str(target)]) == 0
        outputs.append(target.read_bytes())
    assert outputs[0] == outputs[1]
    header, row = outputs[0].decode().splitlines()
    assert "seed" in header and "dt" in header and "n_train" in header
    assert row.split(",")[7] == "7"


def test_sigdump_time_column(tmp_path):
    out = tmp_path / "sig.csv"
    assert cli.main(["sigdump", "--H", "0.5", "--level", "2",
                     "--dt", "0.25", "--out", str(out)]) == 0
    rows = np.loadtxt(out, delimiter=",", skiprows=1)
    # level-1 time coordinate runs up to the horizon
    assert rows[-1, 2] == pytest.approx(1.0)
    assert rows[-1, 3] == pytest.approx(1.0)


def test_linearize_smoke(tmp_path):
    out = tmp_path / "lin.csv"
    assert cli.main(["linearize", "--H", "0.5", "--N", "1", "--dt", "0.02",
                     "--n-test", "256", "--eval-refinement", "2",
                     "--seed", "1", "--out", str(out)]) == 0
    header, row = out.read_text().splitlines()
    assert header.startswith("hurst,level,j_lin,mc_cost")
    fields = row.split(",")
    j_lin, mc, se = float(fields[2]), float(fields[3]), float(fields[4])
    assert abs(j_lin - mc) <= 4.0 * se


def test_worker_override_validation(monkeypatch):
    monkeypatch.setenv("ROUGHCONTROL_WORKERS", "zero")
    assert cli.main(["benchmark", "--problem", "execution"]) == 2
    monkeypatch.setenv("ROUGHCONTROL_WORKERS", "1")
    assert cli.main(["benchmark", "--problem", "execution"]) == 0


def test_simulation_error_exit_code(monkeypatch, tmp_path):
    from roughcontrol.errors import SimulationError

    def boom(*args, **kwargs):
        raise SimulationError("path blew up", path_index=3, step=5)

    monkeypatch.setattr(cli, "train", boom)
    args = ["run", "--problem", "tracking", "--N", "1", "--H", "0.5",
            "--dt", "0.1", "--n-train", "8", "--n-test", "8",
            "--n-steps", "1"]
    assert cli.main(args) == 4
