import csv
import json

import pytest

from bpmap.cli import main


def run_cli(*argv):
    return main(list(argv))


@pytest.fixture(scope="module")
def case1_csv(tmp_path_factory):
    out = tmp_path_factory.mktemp("sim") / "case1.csv"
    code = run_cli(
        "simulate", "--case", "1", "--beta1", "1", "--beta2", "0",
        "--steps", "1500", "--burn-in", "500", "-o", str(out),
    )
    assert code == 0
    return out


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestSimulate:
    def test_writes_expected_shape(self, case1_csv):
        rows = read_rows(case1_csv)
        assert rows[0] == ["t", "X", "Y", "theta"]
        assert len(rows) == 1501
        assert all(len(r) == 4 for r in rows)

    def test_manifest_written(self, case1_csv):
        manifest = json.loads(
            (case1_csv.parent / "case1.manifest.json").read_text()
        )
        assert manifest["command"] == "simulate"
        assert manifest["tool_version"]
        assert manifest["spec"]["case"] == 1

    def test_deterministic_output(self, tmp_path):
        args = ["simulate", "--case", "2", "--beta3", "0.3", "--beta4", "0.5",
                "--steps", "800", "--burn-in", "200"]
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run_cli(*args, "-o", str(p1)) == 0
        assert run_cli(*args, "-o", str(p2)) == 0
        assert p1.read_bytes() == p2.read_bytes()

    def test_invalid_x0_exits_2(self, tmp_path, capsys):
        code = run_cli(
            "simulate", "--case", "1", "--x0", "1.5",
            "-o", str(tmp_path / "x.csv"),
        )
        assert code == 2
        assert "x0" in capsys.readouterr().err

    def test_divergence_exits_3(self, tmp_path):
        code = run_cli(
            "simulate", "--case", "2", "--beta3", "3.0",
            "--steps", "500", "-o", str(tmp_path / "x.csv"),
        )
        assert code == 3

    def test_config_file_with_flag_override(self, tmp_path):
        cfg = tmp_path / "spec.json"
        cfg.write_text(json.dumps(
            {"case": 3, "beta5": 0.2, "beta6": 0.2, "steps": 100, "burn_in": 0}
        ))
        out = tmp_path / "c3.csv"
        assert run_cli("simulate", "--config", str(cfg), "--steps", "60",
                       "-o", str(out)) == 0
        assert len(read_rows(out)) == 61


DETECT_FLAGS = [
    "--L-grid", "50,150,400,900", "--replicates", "3", "--seed", "1",
]


class TestDetect:
    def test_both_methods_write_four_curves_and_verdicts(self, case1_csv, tmp_path):
        outdir = tmp_path / "det"
        code = run_cli(
            "detect", str(case1_csv), "--x", "X", "--y", "Y",
            "--theta", "theta", "--method", "both", *DETECT_FLAGS,
            "-o", str(outdir),
        )
        assert code == 0
        verdicts = json.loads((outdir / "verdicts.json").read_text())
        assert len(verdicts) == 4
        assert {(v["method"], v["cause"], v["effect"]) for v in verdicts} == {
            ("ccm", "X", "Y"), ("ccm", "Y", "X"),
            ("bpm", "X", "Y"), ("bpm", "Y", "X"),
        }
        for v in verdicts:
            assert v["config"]["seed"] == 1
            assert "thresholds" in v["config"]
        rows = read_rows(outdir / "curves.csv")
        assert rows[0] == ["method", "cause", "effect", "L",
                           "replicate_mean", "replicate_std"]
        assert len(rows) == 1 + 4 * 4  # header + 4 curves x 4 grid points
        assert (outdir / "manifest.json").exists()

    def test_bpm_without_theta_exits_2(self, case1_csv, tmp_path):
        code = run_cli(
            "detect", str(case1_csv), "--x", "X", "--y", "Y",
            "--method", "bpm", *DETECT_FLAGS, "-o", str(tmp_path / "d"),
        )
        assert code == 2

    def test_degenerate_theta_exits_4(self, tmp_path):
        data = tmp_path / "flat.csv"
        with open(data, "w") as fh:
            fh.write("X,Y,theta\n")
            x, y = 0.31, 0.62
            for _ in range(400):
                fh.write(f"{x},{y},0.5\n")
                x, y = 3.8 * x * (1 - x), 3.7 * y * (1 - y)
        code = run_cli(
            "detect", str(data), "--x", "X", "--y", "Y", "--theta", "theta",
            "--method", "bpm", "--L-grid", "50,150", "--replicates", "2",
            "-o", str(tmp_path / "d"),
        )
        assert code == 4

    def test_staircase_theta_accepted(self, case1_csv, tmp_path):
        outdir = tmp_path / "stair"
        code = run_cli(
            "detect", str(case1_csv), "--x", "X", "--y", "Y",
            "--theta-staircase", "100", "--respect-trials",
            "--method", "bpm", *DETECT_FLAGS, "-o", str(outdir),
        )
        assert code == 0
        verdicts = json.loads((outdir / "verdicts.json").read_text())
        assert len(verdicts) == 2

    def test_missing_column_exits_2(self, case1_csv, tmp_path):
        code = run_cli(
            "detect", str(case1_csv), "--x", "Z", "--y", "Y",
            "--method", "ccm", *DETECT_FLAGS, "-o", str(tmp_path / "d"),
        )
        assert code == 2


class TestSweep:
    def test_row_count_and_determinism(self, case1_csv, tmp_path):
        args = [
            "sweep", str(case1_csv), "--x", "X", "--y", "Y",
            "--method", "ccm", "--L-grid", "50,100,200,400,700,900",
            "--replicates", "4", "--seed", "3",
        ]
        d1, d2 = tmp_path / "s1", tmp_path / "s2"
        assert run_cli(*args, "-o", str(d1)) == 0
        assert run_cli(*args, "-o", str(d2)) == 0
        rows = read_rows(d1 / "sweep.csv")
        assert rows[0] == ["method", "cause", "effect", "L", "replicate", "skill"]
        assert len(rows) == 1 + 6 * 4 * 2  # header + grid x replicates x directions
        assert (d1 / "sweep.csv").read_bytes() == (d2 / "sweep.csv").read_bytes()

    def test_oversized_grid_exits_2_naming_max(self, case1_csv, tmp_path, capsys):
        code = run_cli(
            "sweep", str(case1_csv), "--x", "X", "--y", "Y",
            "--method", "ccm", "--L-grid", "50,9999", "--replicates", "2",
            "-o", str(tmp_path / "s"),
        )
        assert code == 2
        assert "max usable L" in capsys.readouterr().err