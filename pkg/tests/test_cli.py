import json

import pytest

from rof.cli import main

AND4 = "(and x0 x1 x2 x3)"


@pytest.fixture
def params_file(tmp_path):
    path = tmp_path / "ledger.json"
    path.write_text(json.dumps({"max_and_samples": 4, "max_or_repeats": 4}))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestFormulaCommands:
    def test_eval(self, capsys):
        assert run(capsys, "eval", "(and x0 (or x1 x2))", "101") == (0, "1\n", "")

    def test_eval_json(self, capsys):
        code, out, _ = run(capsys, "--emit", "json", "eval", "(and x0 x1)", "10")
        assert code == 0
        assert json.loads(out) == [{"value": "0"}]

    def test_normalize(self, capsys):
        code, out, _ = run(capsys, "normalize", "--k", "2", "(tbl2 0111 x0 (not x1))")
        assert code == 0
        assert out.strip() == "(or x0 (not x1))"

    def test_normalize_constant(self, capsys):
        code, out, _ = run(capsys, "normalize", "(and x0 0)")
        assert (code, out.strip()) == (0, "0")

    def test_formula_from_file(self, capsys, tmp_path):
        path = tmp_path / "f.rof"
        path.write_text(AND4 + "\n")
        assert run(capsys, "eval", str(path), "1111")[1] == "1\n"

    def test_distance_with_brute_force(self, capsys):
        code, out, _ = run(capsys, "distance", AND4, "0011", "--brute")
        assert (code, out.strip()) == (0, "2 (1/2)")

    def test_distance_to_zero(self, capsys):
        code, out, _ = run(capsys, "distance", AND4, "1111", "--target", "0")
        assert out.strip() == "1 (1/4)"


class TestErrors:
    def test_unknown_command(self, capsys):
        assert run(capsys, "frobnicate")[0] == 1

    def test_syntax_error(self, capsys):
        code, _, err = run(capsys, "eval", "(and x0", "0")
        assert code == 1
        assert err.startswith("Error:")

    def test_wrong_assignment_length(self, capsys):
        assert run(capsys, "eval", AND4, "01")[0] == 1


class TestTrials:
    def test_json_report(self, capsys, params_file):
        code, out, _ = run(
            capsys, "--params", params_file, "--emit", "json", "test", AND4, "0000", "--trials", "3"
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["meta"]["ledger"]["max_and_samples"] == 4
        assert payload["rows"][-1]["reject_rate"] == 1.0
        assert len(payload["rows"]) == 4

    def test_reruns_are_identical(self, capsys, params_file):
        argv = ["--seed", "5", "--params", params_file, "test", "--alg", "3", AND4, "0011", "--trials", "4"]
        assert run(capsys, *argv)[1] == run(capsys, *argv)[1]

    def test_csv_output_file(self, capsys, tmp_path):
        path = tmp_path / "report.csv"
        code, out, _ = run(capsys, "-o", str(path), "test", AND4, "0000", "--trials", "2")
        assert (code, out) == (0, "")
        assert path.read_text().startswith("trial,seed")

    def test_estimate(self, capsys, params_file):
        code, out, _ = run(
            capsys, "--params", params_file, "estimate", "--generator", "balanced-and-or", "--size", "8"
        )
        assert code == 0
        assert json.loads(out)["rows"][-1]["mean_eta"] == 0.5

    def test_batch_threshold_exit_code(self, capsys, tmp_path):
        config = tmp_path / "batch.json"
        config.write_text(
            json.dumps(
                {"formula": AND4, "assignment": "0000", "trials": 2, "min_accept_rate": 1.0}
            )
        )
        code, out, err = run(capsys, "batch", str(config))
        assert code == 2
        assert "Check failed" in err
        assert json.loads(out)["rows"][-1]["accept_rate"] == 0.0

    def test_bad_params_file(self, capsys, tmp_path):
        path = tmp_path / "ledger.json"
        path.write_text(json.dumps({"max_and_samples": -1}))
        assert run(capsys, "--params", str(path), "eval", AND4, "1111")[0] == 1


class TestLowerBoundCommands:
    def test_build(self, capsys):
        code, out, _ = run(capsys, "lb", "build", "--variant", "bal4", "--height", "2")
        assert code == 0
        assert out.strip() == "(mv2 bal4 (mv2 bal4 x0 x1) (mv2 bal4 x2 x3))"

    def test_sample_is_seeded(self, capsys):
        first = run(capsys, "--seed", "3", "lb", "sample", "--dist", "dn", "--height", "4")[1]
        second = run(capsys, "--seed", "3", "lb", "sample", "--dist", "dn", "--height", "4")[1]
        assert first == second
        assert len(first.strip()) == 16

    def test_check(self, capsys):
        code, out, _ = run(capsys, "lb", "check", "--variant", "bal5", "--height", "3")
        assert code == 0
        row = json.loads(out)[0]
        assert row["monotonicity_violations"] == 2
        assert row["heavy_block_accepted"] == 0

    def test_indist_exact(self, capsys):
        code, out, _ = run(capsys, "lb", "indist", "--queries", "0,1,512", "--height", "10")
        assert code == 0
        assert json.loads(out)["rows"][0]["identical"] is True

    def test_farness(self, capsys):
        code, out, _ = run(
            capsys, "--emit", "csv", "lb", "farness", "--variant", "bal4", "--height", "4", "--trials", "5"
        )
        assert code == 0
        assert out.startswith("trial,distance,farness")
