import csv
import io
import json

import pytest

from klball.cli import SweepSpec, run
from klball.errors import InputError


def invoke(*argv):
    out = io.StringIO()
    code = run(list(argv), out=out)
    return code, out.getvalue()


def test_dstar_command():
    code, text = invoke("dstar", "--dist", "0.7,0.3", "--v", "0.2")
    assert code == 0
    report = json.loads(text)
    assert report["value"] == pytest.approx(0.0225824210844, rel=1e-11)
    assert report["method"] == "closed_form_thm1b"
    assert "extremal" not in report


def test_dstar_command_with_extremal():
    code, text = invoke("dstar", "--dist", "[0.5, 0.5]", "--v", "0.2", "--emit-extremal", "--method", "enumerate")
    report = json.loads(text)
    assert code == 0
    assert report["method"] == "enumeration"
    assert report["achieving_subset"] == [0]
    assert report["extremal"] == pytest.approx([0.6, 0.4])


def test_dstar_infinite_value_is_a_string():
    code, text = invoke("dstar", "--dist", "1", "--v", "0.5")
    assert code == 0
    assert json.loads(text)["value"] == "inf"


def test_dstar_full_range_needs_no_distribution():
    code, text = invoke("dstar", "--full-range", "--v", "0.2")
    assert code == 0
    assert json.loads(text)["value"] == pytest.approx(0.020044683159, rel=1e-10)
    assert invoke("dstar", "--v", "0.2")[0] == 2


def test_vajda_command():
    code, text = invoke("vajda", "--v", "0.2", "--check")
    report = json.loads(text)
    assert code == 0
    assert report["L"] == pytest.approx(0.020044683158, rel=1e-10)
    assert report["L_by_minimization"] == pytest.approx(report["L"], abs=1e-8)
    assert report["pinsker"] == pytest.approx(0.02)


def test_vajda_grid():
    code, text = invoke("vajda", "--grid", "0.1:1.9:0.1")
    rows = list(csv.DictReader(io.StringIO(text)))
    assert code == 0
    assert len(rows) == 19
    assert rows[1]["v"] == "0.2"
    assert all(float(r["L"]) >= float(r["pinsker"]) for r in rows)


def test_balance_command():
    code, text = invoke("balance", "--dist", "0.7,0.2,0.1")
    report = json.loads(text)
    assert code == 0
    assert report["beta"] == pytest.approx(0.7)
    assert report["phi"] == pytest.approx(2.1182, abs=1e-4)
    assert report["achieving_subset"] == [0]


def test_balance_capacity_exit_code():
    code, _ = invoke("balance", "--dist", "0.2,0.2,0.2,0.2,0.2", "--k-max", "4", "--exact")
    assert code == 3
    code, text = invoke("balance", "--dist", "0.2,0.2,0.2,0.2,0.2", "--k-max", "4")
    assert code == 0
    assert json.loads(text)["method"] == "greedy_bound"


def test_divergence_command():
    code, text = invoke("divergence", "--p", "0.6,0.4", "--q", "0.7,0.3")
    report = json.loads(text)
    assert report["tv"] == pytest.approx(0.2)
    assert report["kl"] == pytest.approx(0.0225824210844, rel=1e-11)
    assert invoke("divergence", "--p", "1", "--q", "0.5,0.5")[0] == 2
    assert invoke("divergence", "--p", "1", "--q", "0.5,0.5", "--pad")[0] == 0


def test_bounds_sweep_ordering():
    code, text = invoke("bounds", "--dist", "0.7,0.2,0.1", "--grid", "0.05:1.95:0.05")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(text)))
    assert list(rows[0]) == ["v", "pinsker", "ow", "vajda_L", "dstar", "thm1a_upper"]
    assert len(rows) == 39
    for row in rows:
        pinsker, ow, low, value = (float(row[c]) for c in ("pinsker", "ow", "vajda_L", "dstar"))
        assert pinsker <= ow * (1 + 1e-11)
        assert ow <= value * (1 + 1e-11)
        assert low <= value * (1 + 1e-11)
        if row["thm1a_upper"]:
            assert value <= float(row["thm1a_upper"]) * (1 + 1e-11)
        else:
            assert float(row["v"]) >= 1.0


def test_bounds_beta_grid():
    code, text = invoke("bounds", "--beta-grid", "0.5:0.95:0.05", "--v", "0.3")
    rows = list(csv.DictReader(io.StringIO(text)))
    assert code == 0
    assert len(rows) == 10
    assert rows[0]["beta"] == "0.5"
    assert float(rows[0]["ow"]) == pytest.approx(0.045)


def test_bounds_needs_one_grid():
    assert invoke("bounds", "--dist", "0.5,0.5")[0] == 2


def test_sanov_is_byte_identical_across_workers():
    argv = ["sanov", "--dist", "0.6,0.3,0.1", "--n", "40", "--eps", "0.3", "--trials", "10000", "--seed", "9"]
    code1, one = invoke(*argv, "--workers", "1")
    code8, eight = invoke(*argv, "--workers", "8")
    assert code1 == code8 == 0
    assert one == eight
    report = json.loads(one)
    assert {"estimate", "dstar", "mcdiarmid_bound", "lambda_n", "config"} <= set(report)


def test_sanov_n_grid():
    code, text = invoke(
        "sanov", "--dist", "0.7,0.3", "--n-grid", "10:30:10", "--eps", "0.2", "--trials", "500", "--seed", "1"
    )
    rows = list(csv.DictReader(io.StringIO(text)))
    assert code == 0
    assert [r["n"] for r in rows] == ["10", "20", "30"]
    assert all(r["binary_tail_exact"] for r in rows)


def test_input_errors_exit_2(capsys):
    assert invoke("dstar", "--dist", "0.7,-0.3", "--v", "0.2")[0] == 2
    assert invoke("dstar", "--dist", "0.7,0.4", "--v", "0.2")[0] == 2
    assert invoke("dstar", "--dist", "0.7,0.4", "--v", "0.2", "--renormalize")[0] == 0
    assert invoke("dstar", "--dist", "0.7,0.3", "--v", "2.0")[0] == 2
    assert invoke("dstar", "--dist", "0.7,0.3", "--v", "0.2", "--bogus")[0] == 2
    assert invoke("nonsense")[0] == 2
    assert "❌" in capsys.readouterr().err


def test_sweep_spec():
    assert SweepSpec.parse("v", "0.1:0.3:0.1").values() == pytest.approx([0.1, 0.2, 0.3])
    assert SweepSpec.parse("n", "10:12:1").integer_values() == [10, 11, 12]
    for bad in ("0.3:0.1:0.1", "0:1:0", "0:1", "a:b:c", "0:1:1e-7"):
        with pytest.raises(InputError):
            SweepSpec.parse("v", bad)
    with pytest.raises(InputError):
        SweepSpec("temperature", 0.0, 1.0, 0.1)


def test_digits_setting():
    code, text = invoke("vajda", "--v", "0.2", "--digits", "3")
    assert json.loads(text)["L"] == 0.02


def test_distribution_from_stdin(monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO("0.7\n0.2\n0.1\n"))
    code, text = invoke("balance", "--dist", "-")
    assert code == 0
    assert json.loads(text)["beta"] == pytest.approx(0.7)


def test_output_has_no_stream_size_knob():
    argv = ["sanov", "--dist", "0.7,0.3", "--n", "20", "--eps", "0.2", "--trials", "100"]
    assert invoke(*argv, "--block-size", "256")[0] == 2
    assert invoke("dstar", "--dist", "0.7,0.3", "--v", "0.2", "--k-max", "27")[0] == 2
    assert invoke("dstar", "--dist", "0.7,0.3", "--v", "0.2", "--k-max", "26")[0] == 0
