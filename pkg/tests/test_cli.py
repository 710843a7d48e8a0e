"""CLI subcommands, exit codes, and the experiment CSV contract."""

import csv
import json
import math

import pytest

from vrank.cli import CSV_COLUMNS, ExperimentSpec, main, run_experiment
from vrank.families import Family


@pytest.fixture
def d3_path(tmp_path):
    p = tmp_path / "d3.stn"
    p.write_text("stencil 3 3\n0**\n*0*\n**0\n")
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


class TestGen:
    def test_gen_to_stdout(self, capsys):
        code, out = run(capsys, "gen", "--family", "lrc", "--n", "6", "--ell", "2", "--seed", "1")
        assert code == 0
        assert out.startswith("stencil 6 6\n")

    def test_gen_to_file_records_seed(self, capsys, tmp_path):
        out_path = str(tmp_path / "h.json")
        code, out = run(capsys, "gen", "--family", "drgp", "--n", "8", "--t", "2",
                        "--seed", "3", "-o", out_path)
        assert code == 0
        assert json.loads(out)["seed"] == 3

    def test_gen_deterministic(self, capsys):
        a = run(capsys, "gen", "--family", "lcc", "--n", "30", "--q", "3",
                "--delta", "0.1", "--seed", "5")
        b = run(capsys, "gen", "--family", "lcc", "--n", "30", "--q", "3",
                "--delta", "0.1", "--seed", "5")
        assert a == b

    def test_gen_bad_params_exit_2(self, capsys):
        code, _ = run(capsys, "gen", "--family", "lrc", "--n", "4", "--ell", "9")
        assert code == 2

    def test_gen_missing_param_exit_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run(capsys, "gen", "--family", "lrc", "--n", "4")
        assert exc.value.code == 2


class TestVrank:
    def test_d3(self, capsys, d3_path):
        code, out = run(capsys, "vrank", d3_path)
        doc = json.loads(out)
        assert code == 0
        assert doc["lower"] == doc["upper"] == 2 and doc["exact"]

    def test_missing_file_exit_2(self, capsys):
        code, _ = run(capsys, "vrank", "/nonexistent.stn")
        assert code == 2


class TestCertify:
    def test_drgp_certifies(self, capsys, tmp_path):
        p = str(tmp_path / "h.json")
        run(capsys, "gen", "--family", "drgp", "--n", "8", "--t", "2", "--seed", "3", "-o", p)
        code, out = run(capsys, "certify", p, "--power", "2")
        assert code == 0
        assert json.loads(out)["certified_vrk_power_lower_bound"] == 8

    def test_non_certifying_exit_1(self, capsys, tmp_path):
        # all-star group columns: the AND sub-stencil is all-star, not identity
        p = tmp_path / "h.json"
        doc = {
            "rows": 4, "cols": 2,
            "row_labels": [[1, 1], [1, 2], [2, 1], [2, 2]],
            "col_labels": [[1], [2]],
            "stars": [[i, j] for i in range(1, 5) for j in range(1, 3)],
        }
        p.write_text(json.dumps(doc))
        code, out = run(capsys, "certify", str(p), "--power", "2")
        assert code == 1
        assert not json.loads(out)["identity"]


class TestMinrankWitness:
    def test_minrank_d3(self, capsys, d3_path):
        code, out = run(capsys, "minrank", d3_path, "--field", "3")
        doc = json.loads(out)
        assert code == 0 and doc["minrank"] == 2 and doc["exhaustive"]

    def test_minrank_nonprime_exit_2(self, capsys, d3_path):
        code, _ = run(capsys, "minrank", d3_path, "--field", "4")
        assert code == 2

    def test_witness_d3(self, capsys, d3_path):
        code, out = run(capsys, "witness", d3_path, "--field", "5")
        doc = json.loads(out)
        assert code == 0
        assert doc["rank"] <= doc["max_row_zeros"] + 1


class TestSpanoid:
    def test_rank_and_check(self, capsys, tmp_path):
        p = tmp_path / "s.json"
        p.write_text(json.dumps({"n": 3, "sets": [[1, 2], [2, 3]]}))
        code, out = run(capsys, "spanoid", "rank", str(p))
        assert code == 0 and json.loads(out)["rank"] == 1
        code, out = run(capsys, "spanoid", "check", str(p), "--columns")
        assert code == 0 and json.loads(out)["identity_holds"]


class TestVerify:
    def test_certificate_round_trip(self, capsys, d3_path, tmp_path):
        _, out = run(capsys, "vrank", d3_path)
        cert_path = tmp_path / "cert.json"
        cert_path.write_text(out)
        code, out = run(capsys, "verify", d3_path, "--certificate", str(cert_path))
        assert code == 0 and json.loads(out)["certificate_valid"]

    def test_tampered_certificate_exit_1(self, capsys, d3_path, tmp_path):
        _, out = run(capsys, "vrank", d3_path)
        doc = json.loads(out)["certificate"]
        doc["rows"] = list(reversed(doc["rows"]))
        doc["rows"][0] = doc["rows"][0] % 3 + 1
        cert_path = tmp_path / "cert.json"
        cert_path.write_text(json.dumps(doc))
        code, _ = run(capsys, "verify", d3_path, "--certificate", str(cert_path))
        assert code in (0, 1)  # tampering may accidentally stay valid ...
        doc["peel_order"] = []
        cert_path.write_text(json.dumps(doc))
        code, _ = run(capsys, "verify", d3_path, "--certificate", str(cert_path))
        assert code == 1

    def test_family_membership(self, capsys, tmp_path):
        p = str(tmp_path / "h.json")
        run(capsys, "gen", "--family", "drgp", "--n", "8", "--t", "2", "--seed", "3", "-o", p)
        code, out = run(capsys, "verify", p, "--family", "drgp", "--n", "8", "--t", "2")
        assert code == 0 and json.loads(out)["valid"]

    def test_wrong_family_exit_1(self, capsys, tmp_path):
        p = str(tmp_path / "h.json")
        run(capsys, "gen", "--family", "tensor-gap", "--n", "8", "--t", "3", "--seed", "3", "-o", p)
        code, out = run(capsys, "verify", p, "--family", "drgp", "--n", "8", "--t", "3")
        assert code == 1 and not json.loads(out)["valid"]

    def test_no_mode_exit_2(self, capsys, d3_path):
        code, _ = run(capsys, "verify", d3_path)
        assert code == 2


class TestExperiment:
    def test_csv_schema_and_determinism(self, tmp_path):
        spec = ExperimentSpec(Family.LRC, [8], [2], trials=3, seed=11,
                              csv_path=str(tmp_path / "out.csv"))
        rows1 = run_experiment(spec)
        with open(tmp_path / "out.csv") as fh:
            reader = csv.DictReader(fh)
            assert reader.fieldnames == CSV_COLUMNS
            assert len(list(reader)) == 3
        rows2 = run_experiment(spec)
        strip = lambda rs: [{k: v for k, v in r.items() if k != "ms"} for r in rs]
        assert strip(rows1) == strip(rows2)

    def test_lrc_rows_meet_greedy_floor(self):
        spec = ExperimentSpec(Family.LRC, [8, 12], [2], trials=2, seed=0)
        for row in run_experiment(spec):
            assert row["vrk_lb"] >= math.ceil(row["n"] / 3)

    def test_drgp_rows_flag_tensor_certificate(self):
        spec = ExperimentSpec(Family.DRGP, [8], [2], trials=2, seed=0)
        for row in run_experiment(spec):
            assert row["tensor_cert"] == "true"

    def test_empty_sweep_rejected(self):
        with pytest.raises(ValueError):
            ExperimentSpec(Family.LRC, [], [2])
        with pytest.raises(ValueError):
            ExperimentSpec(Family.LRC, [8], [2], trials=0)

    def test_infeasible_point_reported_run_continues(self):
        spec = ExperimentSpec(Family.LRC, [4], [2, 9], trials=1, seed=0)
        rows = run_experiment(spec)
        assert len(rows) == 2
        assert str(rows[1]["vrk_lb"]).startswith("error")

    def test_cli_flags(self, capsys):
        code, out = run(capsys, "experiment", "--family", "lrc", "--n", "6,8",
                        "--ell", "2", "--trials", "1", "--seed", "3")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0].rstrip() == ",".join(CSV_COLUMNS)
        assert len(lines) == 3

    def test_spec_file(self, capsys, tmp_path):
        p = tmp_path / "spec.json"
        p.write_text(json.dumps({"family": "drgp", "n": [6], "param": [2], "trials": 1}))
        code, out = run(capsys, "experiment", "--spec", str(p))
        assert code == 0 and len(out.strip().splitlines()) == 2


class TestUsage:
    def test_unknown_command(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["bogus"])
        assert exc.value.code == 2
