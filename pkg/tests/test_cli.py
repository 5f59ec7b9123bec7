import json
import math
import subprocess
import sys

import pytest

from hadfrac.cli import main
from hadfrac.generators import random_positive


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestEval:
    def test_unit(self, capsys):
        code, out, _ = run(capsys, "eval", "--op", "hadamard-left", "--alpha", "1", "--beta", "1",
                           "--x", "2.71828182845", "--fn", "const:1")
        doc = json.loads(out)
        assert code == 0
        # x is e truncated, so the exact value is ln x
        assert doc["value"] == pytest.approx(math.log(2.71828182845), abs=1e-12)
        assert doc["value"] == pytest.approx(1.0, abs=1e-11)
        assert {"value", "err_est", "n_used"} <= set(doc)

    def test_half_order(self, capsys):
        code, out, _ = run(capsys, "eval", "--op", "hadamard-left", "--alpha", "0.5", "--beta", "1",
                           "--x", "2.71828182845", "--fn", "const:1")
        assert code == 0 and json.loads(out)["value"] == pytest.approx(1.128379, abs=1e-6)

    def test_closed_form(self, capsys):
        code, out, _ = run(capsys, "eval", "--op", "closed-form", "--alpha", "1", "--beta", "0.5",
                           "--lambda", "2", "--x", "2.71828182845")
        assert code == 0 and json.loads(out)["value"] == pytest.approx(0.367879, abs=1e-6)

    def test_default_x_is_e(self, capsys):
        _, out, _ = run(capsys, "eval", "--alpha", "1", "--fn", "const:1")
        assert json.loads(out)["value"] == pytest.approx(1.0, rel=1e-14)

    def test_power_source(self, capsys):
        _, out, _ = run(capsys, "eval", "--alpha", "1", "--beta", "0.5", "--fn", "power:2")
        assert json.loads(out)["value"] == pytest.approx(math.exp(-1), rel=1e-12)

    def test_other_operators(self, capsys):
        _, out, _ = run(capsys, "eval", "--op", "hadamard-right", "--alpha", "0.5", "--x", "1",
                        "--b", str(math.e), "--fn", "const:1")
        assert json.loads(out)["value"] == pytest.approx(2 / math.sqrt(math.pi), rel=1e-12)
        _, out, _ = run(capsys, "eval", "--op", "rl-left", "--alpha", "2", "--x", "1", "--fn", "const:1")
        assert json.loads(out)["value"] == pytest.approx(0.5, rel=1e-13)

    def test_spline_file(self, capsys, tmp_path):
        import numpy as np
        z = random_positive(np.random.default_rng(0))
        path = tmp_path / "z.json"
        path.write_text(json.dumps(z.to_json()))
        _, out, _ = run(capsys, "eval", "--alpha", "0.7", "--fn", f"spline:{path}")
        from hadfrac.operators import FracParams, hadamard_left
        assert json.loads(out)["value"] == pytest.approx(
            hadamard_left(z, math.e, FracParams(0.7)).value, rel=1e-15)
        _, out2, _ = run(capsys, "eval", "--alpha", "0.7", "--fn", path.read_text())
        assert out2 == out

    @pytest.mark.parametrize("fn", ["bogus", "spline:/nonexistent.json", "const:abc", "{not json"])
    def test_parse_failure_exit_2(self, capsys, fn):
        code, _, err = run(capsys, "eval", "--alpha", "1", "--fn", fn)
        assert code == 2 and "input error" in err

    def test_bad_params_exit_2(self, capsys):
        assert run(capsys, "eval", "--alpha", "0.01", "--fn", "const:1")[0] == 2

    def test_domain_error_exit_3(self, capsys):
        code, _, err = run(capsys, "eval", "--alpha", "1", "--x", "0.5", "--fn", "const:1")
        assert code == 3 and "domain error" in err
        assert run(capsys, "eval", "--alpha", "1", "--x", "100", "--fn", "const:1")[0] == 3


class TestIdentity:
    def test_passes(self, capsys):
        code, out, _ = run(capsys, "identity", "--semigroup-trials", "5", "--reduction-funcs", "5")
        assert code == 0
        assert "FAIL" not in out

    def test_corrupted_gamma_fails(self, capsys):
        code, out, _ = run(capsys, "identity", "--semigroup-trials", "2", "--reduction-funcs", "2",
                           "--corrupt-gamma", "1.001")
        assert code == 1 and "FAIL" in out

    def test_unit_reduction(self):
        from hadfrac.identities import classical_hadamard
        from hadfrac.numcore import constant
        from hadfrac.operators import FracParams, hadamard_left
        z = constant(1.0)
        ours = hadamard_left(z, math.e, FracParams(1, 1)).value
        assert abs(ours - classical_hadamard(z, math.e, 1.0)) <= 1e-12


SUITE = ["suite", "--trials", "10", "--seed", "42", "--alphas", "0.5", "--betas", "0.5", "1",
         "--ps", "2", "--xs", "2.718281828459045"]


class TestSuite:
    def test_deterministic(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run(capsys, *SUITE, "--out", str(a))[0] == 0
        assert run(capsys, *SUITE, "--out", str(b))[0] == 0
        assert a.read_bytes() == b.read_bytes()

    def test_stdout_csv_and_summary(self, capsys):
        code, out, err = run(capsys, *SUITE, "--theorem", "T4_1")
        assert code == 0
        assert out.startswith("theorem_id,alpha,beta")
        assert "T4_1: trials=10" in err

    def test_T4_4_census_exit_0(self, capsys):
        code, _, err = run(capsys, "suite", "--trials", "20", "--theorem", "T4_4")
        assert code == 0 and "T4_4: trials=20" in err

    def test_replay_roundtrip(self, capsys, tmp_path):
        rep = tmp_path / "report.json"
        run(capsys, *SUITE, "--theorem", "T4_5", "--format", "json", "--out", str(rep))
        code, out, _ = run(capsys, "replay", str(rep), "--trial", "7")
        doc = json.loads(out)
        assert code == 0 and doc["match"]
        assert doc["replayed"]["lhs"] == pytest.approx(doc["recorded"]["lhs"], rel=1e-12)

    def test_replay_variant(self, capsys, tmp_path):
        rep = tmp_path / "report.json"
        run(capsys, *SUITE, "--theorem", "T3_1", "--json", str(rep))
        code, out, _ = run(capsys, "replay", str(rep), "--trial", "3", "--variant")
        assert code == 0 and json.loads(out)["match"]

    def test_replay_ambiguous_and_missing(self, capsys, tmp_path):
        rep = tmp_path / "report.json"
        run(capsys, *SUITE, "--theorem", "T4_5", "--theorem", "T4_7", "--json", str(rep))
        assert run(capsys, "replay", str(rep), "--trial", "2")[0] == 2
        assert run(capsys, "replay", str(rep), "--trial", "2", "--theorem", "T4_7")[0] == 0
        assert run(capsys, "replay", str(rep), "--trial", "999", "--theorem", "T4_7")[0] == 2

    def test_unreadable_report(self, capsys, tmp_path):
        assert run(capsys, "replay", str(tmp_path / "none.json"), "--trial", "0")[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "hadfrac", "eval", "--alpha", "1", "--fn", "const:1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["value"] == pytest.approx(1.0)
