import json

import pytest

import dpjscc
from dpjscc.cli import main


def test_codes_list(capsys):
    assert main(["codes", "list"]) == 0
    out = capsys.readouterr().out.strip().split("\n")
    assert out[0].startswith("id,p1,R,")
    assert len(out) == 1 + len(dpjscc.fixture_ids())
    assert any(line.startswith("p04_r1_opt,0.04,1,") for line in out)


def test_threshold_command(capsys):
    assert main(["threshold", "--code", "p04_r1_opt", "--resolution", "0.01"]) == 0
    out = capsys.readouterr().out.strip().split("\n")
    assert out[0] == (
        "code_id,threshold_dB,shannon_gauss_dB,shannon_biawgn_dB,iterations_at_threshold"
    )
    fields = out[1].split(",")
    assert fields[0] == "p04_r1_opt"
    assert abs(float(fields[1]) - (-5.267)) <= 0.1
    assert abs(float(fields[2]) - (-7.00)) <= 0.02


def test_threshold_missing_file():
    with pytest.raises(SystemExit):
        main(["threshold", "--code", "missing.json"])


def test_unknown_flag_exits_2():
    with pytest.raises(SystemExit) as info:
        main(["threshold", "--bogus"])
    assert info.value.code == 2


def test_analyze_command(capsys, tmp_path):
    out_file = tmp_path / "table.csv"
    assert main(["analyze", "--new", "p04_r1_opt", "--old", "p04_r1_base",
                 "--out", str(out_file)]) == 0
    text = out_file.read_text()
    assert "complexity_increase_source_encoding_pct,20.0" in text
    assert "delta_latency_dec_pct,0.0" in text
    manifest = json.loads((tmp_path / "table.csv.manifest.json").read_text())
    assert manifest["subcommand"] == "analyze"
    assert str(out_file) in manifest["outputs"]


def test_lift_command_idempotent(capsys, tmp_path):
    out = tmp_path / "code.qc"
    alist = tmp_path / "code.alist"
    args = ["lift", "--code", "p04_r1_opt", "--z1", "4", "--z2", "40",
            "--seed", "3", "--attempts", "30", "--out", str(out),
            "--alist", str(alist)]
    assert main(args) == 0
    first = out.read_bytes(), alist.read_bytes()
    assert main(args) == 0
    assert (out.read_bytes(), alist.read_bytes()) == first
    manifest = json.loads((tmp_path / "code.qc.manifest.json").read_text())
    assert manifest["seeds"]["seed"] == 3
    # round-trip through the persistence loader
    from dpjscc.lifting import load_qc

    qc = load_qc(out, dpjscc.load_fixture("p04_r1_opt"))
    assert qc.z2 == 40 and qc.girth >= 6


def test_simulate_command(capsys, tmp_path):
    out = tmp_path / "sweep.csv"
    args = ["simulate", "--code", "p04_r1_opt", "--z1", "4", "--z2", "50",
            "--esn0-grid", "10.0", "--seed", "5", "--lift-seed", "1",
            "--max-frames", "20", "--target-error-frames", "3",
            "--min-frames", "5", "--i-max", "30", "--out", str(out)]
    assert main(args) == 0
    rows = out.read_text().strip().split("\n")
    assert rows[0].startswith("code_id,esn0_db,")
    assert rows[1].startswith("p04_r1_opt,10.0,21,")
    # identical rerun reuses the completed row byte for byte
    before = out.read_bytes()
    assert main(args) == 0
    assert out.read_bytes() == before


def test_optimize_command(tmp_path, capsys):
    best = tmp_path / "best.json"
    hist = tmp_path / "hist.csv"
    args = ["optimize", "--code", "p04_r1_base", "--method", "enumerate",
            "--orientation", "both", "--out", str(best), "--history", str(hist)]
    assert main(args) == 0
    opt = dpjscc.load_code(best)
    assert opt.link.entries.tolist() == [[1, 1], [0, 1]]
    lines = hist.read_text().strip().split("\n")
    assert lines[0] == "generation,best_threshold_db,assignment"
    assert len(lines) == 1 + 7


def test_grid_parsing(tmp_path):
    out = tmp_path / "s.csv"
    args = ["simulate", "--code", "p14_r1_base", "--z1", "4", "--z2", "50",
            "--esn0-grid", "9.0:10.0:0.5", "--seed", "5", "--lift-seed", "1",
            "--max-frames", "5", "--target-error-frames", "2",
            "--min-frames", "2", "--i-max", "20", "--out", str(out)]
    assert main(args) == 0
    rows = out.read_text().strip().split("\n")
    assert len(rows) == 1 + 3  # 9.0, 9.5, 10.0
