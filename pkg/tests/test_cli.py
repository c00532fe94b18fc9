"""Command-line interface: config resolution, exit codes, output files."""

import json

import pytest

from pulse_dicke import ENTROPY_COLUMNS, FIDELITY_COLUMNS, NEGATIVITY_COLUMNS
from pulse_dicke.cli import UsageError, main, parse_config


def _lines(text):
    return text.rstrip("\n").split("\n")


# ------------------------------------------------------ config resolution

def test_defaults_resolved():
    cmd, cfg, print_only = parse_config(["sweep-fidelity"])
    assert cmd == "sweep-fidelity"
    assert not print_only
    assert cfg["n"] == [3]
    assert cfg["upsilon_min"] == 0.05
    assert cfg["upsilon_max"] == 5.0
    assert cfg["upsilon_points"] == 60
    assert cfg["samples"] == 121
    assert cfg["format"] == "csv"
    assert cfg["out"] is None
    assert isinstance(cfg["workers"], int) and cfg["workers"] >= 1


def test_flag_overrides_config_file(tmp_path):
    f = tmp_path / "run.json"
    f.write_text(json.dumps({"peak": 1.0, "samples": 11}))
    _, cfg, _ = parse_config(["sweep-fidelity", "--config", str(f),
                              "--peak", "0.5"])
    assert cfg["peak"] == 0.5
    assert cfg["samples"] == 11


def test_unknown_config_key_rejected(tmp_path):
    f = tmp_path / "run.json"
    f.write_text(json.dumps({"peaks": 1.0}))
    with pytest.raises(UsageError, match="peaks"):
        parse_config(["sweep-fidelity", "--config", str(f)])


def test_config_file_command_mismatch(tmp_path):
    f = tmp_path / "run.json"
    f.write_text(json.dumps({"command": "entropy-map", "samples": 11}))
    with pytest.raises(UsageError, match="entropy-map"):
        parse_config(["sweep-fidelity", "--config", str(f)])


def test_print_config_round_trips(tmp_path, capsys):
    argv = ["sweep-fidelity", "--samples", "11", "--workers", "2",
            "--upsilon-points", "7"]
    assert main(argv + ["--print-config"]) == 0
    echoed = capsys.readouterr().out
    f = tmp_path / "echo.json"
    f.write_text(echoed)
    _, cfg_first, _ = parse_config(argv)
    _, cfg_again, _ = parse_config(["sweep-fidelity", "--config", str(f)])
    assert cfg_again == cfg_first


def test_workers_env_default(monkeypatch):
    monkeypatch.setenv("PULSE_DICKE_WORKERS", "3")
    _, cfg, _ = parse_config(["sweep-fidelity"])
    assert cfg["workers"] == 3
    monkeypatch.setenv("PULSE_DICKE_WORKERS", "many")
    assert main(["sweep-fidelity", "--print-config"]) == 1


# ------------------------------------------------------------- exit code 1

def test_invalid_flag_values_exit_1(capsys):
    assert main(["sweep-fidelity", "--n", "0"]) == 1
    assert "n_attackers" in capsys.readouterr().err
    assert main(["sweep-fidelity", "--upsilon-min", "2", "--upsilon-max", "1"]) == 1
    assert main(["sweep-fidelity", "--workers", "0"]) == 1
    assert main(["sweep-fidelity", "--format", "xml"]) == 1
    assert main(["find-ustar", "--bracket-lo", "1", "--bracket-hi", "1"]) == 1


def test_unknown_command_exit_1():
    assert main(["frobnicate"]) == 1
    assert main([]) == 1


def test_conflicting_truncation_flags(capsys):
    assert main(["negativity-trace", "--n-max", "16",
                 "--n-max-start", "16"]) == 1
    assert "mutually exclusive" in capsys.readouterr().err
    # either flag alone is fine
    parse_config(["negativity-trace", "--n-max", "16"])
    parse_config(["negativity-trace", "--n-max-start", "16"])


def test_unwritable_output_exit_1(tmp_path):
    out = tmp_path / "missing" / "out.csv"
    rc = main(["sweep-fidelity", "--n", "1", "--upsilon-min", "1",
               "--upsilon-max", "2", "--upsilon-points", "2",
               "--samples", "5", "--n-max-start", "16",
               "--out", str(out)])
    assert rc == 1
    assert not (tmp_path / "missing").exists()


# ------------------------------------------------------------ end to end

def test_sweep_fidelity_writes_csv(tmp_path):
    out = tmp_path / "sweep.csv"
    rc = main(["sweep-fidelity", "--n", "1", "--upsilon-min", "1",
               "--upsilon-max", "4", "--upsilon-points", "2",
               "--samples", "21", "--n-max-start", "16",
               "--workers", "1", "--out", str(out)])
    assert rc == 0
    lines = _lines(out.read_text())
    assert lines[0] == ",".join(FIDELITY_COLUMNS)
    assert len(lines) == 1 + 2
    assert all(line.startswith("1,") for line in lines[1:])


def test_negativity_trace_writes_csv(tmp_path):
    out = tmp_path / "neg.csv"
    rc = main(["negativity-trace", "--n", "1", "--upsilon", "1.0",
               "--kappa", "0.0", "--samples", "3", "--n-max", "16",
               "--steps-per-unit-time", "400", "--workers", "1",
               "--out", str(out)])
    assert rc == 0
    lines = _lines(out.read_text())
    assert lines[0] == ",".join(NEGATIVITY_COLUMNS)
    assert len(lines) == 1 + 3


def test_entropy_map_to_stdout(capsys):
    rc = main(["entropy-map", "--n", "1", "--upsilon-min", "1",
               "--upsilon-max", "2", "--upsilon-points", "2",
               "--samples", "5", "--n-max-start", "16", "--workers", "1"])
    assert rc == 0
    lines = _lines(capsys.readouterr().out)
    assert lines[0] == ",".join(ENTROPY_COLUMNS)
    assert len(lines) == 1 + 2 * 5


def test_find_ustar_no_minimum_exit_2(capsys):
    rc = main(["find-ustar", "--n", "1", "--bracket-lo", "1",
               "--bracket-hi", "5", "--coarse-points", "8",
               "--n-max-start", "16"])
    assert rc == 2
    assert "no minimum" in capsys.readouterr().err


def test_find_ustar_writes_json(tmp_path):
    out = tmp_path / "ustar.json"
    rc = main(["find-ustar", "--n", "1", "--bracket-lo", "0.2",
               "--bracket-hi", "0.9", "--coarse-points", "7",
               "--refine-tol", "0.05", "--n-max-start", "16",
               "--out", str(out)])
    assert rc == 0
    payload = json.loads(out.read_text())
    assert set(payload) == {"n_attackers", "upsilon_star", "fidelity_min",
                            "n_max_used"}
    assert payload["n_attackers"] == 1
    assert 0.3 < payload["upsilon_star"] < 0.6
    assert payload["fidelity_min"] == pytest.approx(0.52575, rel=2e-2)


def test_validate_reports_every_check(capsys):
    rc = main(["validate"])
    captured = capsys.readouterr()
    assert rc == 0
    lines = _lines(captured.out)
    assert len(lines) >= 20
    assert all(line.startswith("ok  ") for line in lines)
    assert "checks passed" in captured.err
