import json

import pytest

from marcsim import evaluate_realization, realization_from_json
from marcsim.cli import _parse_grid, main
from marcsim.errors import ValidationError


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_parse_grid_single_and_range():
    assert _parse_grid("20") == (20.0,)
    assert _parse_grid("0:40:10") == (0.0, 10.0, 20.0, 30.0, 40.0)
    assert _parse_grid("-10:0:5") == (-10.0, -5.0, 0.0)
    with pytest.raises(ValidationError):
        _parse_grid("0:10")
    with pytest.raises(ValidationError):
        _parse_grid("10:0:5")


def test_sample_emits_valid_deterministic_json(capsys):
    code, out1, _ = run_cli(capsys, "sample", "--users", "4", "--antennas", "3",
                            "--seed", "11", "--alpha", "0.5")
    assert code == 0
    c = realization_from_json(out1)
    assert c.K == 4 and c.M_r == 3
    code, out2, _ = run_cli(capsys, "sample", "--users", "4", "--antennas", "3",
                            "--seed", "11", "--alpha", "0.5")
    assert out1 == out2


def test_sample_eval_roundtrip(tmp_path, capsys):
    path = tmp_path / "realization.json"
    code, _, _ = run_cli(capsys, "sample", "--users", "3", "--seed", "2",
                         "--out", str(path))
    assert code == 0
    code, out, _ = run_cli(capsys, "eval", str(path))
    assert code == 0
    doc = json.loads(out)
    c = realization_from_json(path.read_text())
    direct = evaluate_realization(c)
    assert doc["joint"]["r_lower"] == pytest.approx(direct.bounds.r_lower)
    assert doc["tdma"]["sum_rate"] == pytest.approx(direct.tdma.sum_rate)
    assert doc["joint"]["r_lower"] <= doc["joint"]["r_up_min"] + 1e-9
    assert doc["asymptotic"]["joint_wins"] == direct.asymptotic.joint_wins


def test_eval_missing_file_is_io_error(capsys):
    code, _, err = run_cli(capsys, "eval", "/nonexistent/path.json")
    assert code == 3


def test_eval_invalid_json_is_validation_error(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{broken")
    code, _, _ = run_cli(capsys, "eval", str(path))
    assert code == 1


def test_sweep_csv_deterministic_across_workers(tmp_path, capsys):
    args = ["sweep", "--users", "3", "--antennas", "2", "--alpha", "0.5",
            "--alpha", "1.0", "--pr-db", "0:10:10", "--trials", "5",
            "--seed", "9"]
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run_cli(capsys, *args, "--out", str(p1))[0] == 0
    assert run_cli(capsys, *args, "--out", str(p2), "--workers", "2")[0] == 0
    assert p1.read_bytes() == p2.read_bytes()
    lines = p1.read_text().splitlines()
    assert lines[0] == "alpha,pr_db,metric,mean,stderr,n_trials,seed"
    assert len(lines) == 1 + 2 * 2 * 5


def test_sweep_unwritable_path_is_io_error(capsys):
    code, _, _ = run_cli(capsys, "sweep", "--trials", "1",
                         "--out", "/nonexistent-dir/out.csv")
    assert code == 3


def test_prob_csv(tmp_path, capsys):
    path = tmp_path / "prob.csv"
    code, _, _ = run_cli(capsys, "prob", "--users", "4", "--antennas", "2",
                         "--alpha", "0.1", "--alpha", "1.0",
                         "--pmax-db", "0:10:10", "--trials", "20",
                         "--seed", "4", "--out", str(path))
    assert code == 0
    lines = path.read_text().splitlines()
    assert lines[0] == "alpha,pmax_db,probability,stderr,n_trials,seed"
    assert len(lines) == 1 + 2 * 2
    probs = [float(line.split(",")[2]) for line in lines[1:]]
    assert all(0.0 <= p <= 1.0 for p in probs)


def test_check_passes_on_defaults(capsys):
    code, out, _ = run_cli(capsys, "check", "--trials", "10", "--seed", "3")
    assert code == 0
    assert "FAIL" not in out
    assert out.count("PASS") >= 8


def test_bad_flags_exit_one(capsys):
    assert run_cli(capsys, "sweep", "--users", "not-a-number")[0] == 1
    assert run_cli(capsys, "sweep", "--pr-db", "10:0:5")[0] == 1
    assert run_cli(capsys, "nonsense-command")[0] == 1


def test_invalid_scenario_exit_one(capsys):
    code, _, _ = run_cli(capsys, "sample", "--users", "0")
    assert code == 1
