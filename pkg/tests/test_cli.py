from __future__ import annotations

import io
import json
import subprocess
import sys

import pytest

from cmkisin.cli import SCHEMA, run


def invoke(*argv):
    buf = io.StringIO()
    code = run(list(argv), stream=buf)
    text = buf.getvalue()
    return code, text


def report(*argv):
    code, text = invoke(*argv)
    return code, json.loads(text)


def test_lines_h2_p5():
    code, rep = report("lines", "--preset", "h2-level2", "--p", "5")
    assert code == 0
    assert rep["schema"] == SCHEMA
    assert rep["outputs"]["e"] == 40
    assert sorted(x["mu"] for x in rep["outputs"]["lines"]) == [20, 36]
    assert sorted(x["hodge_exponent"] for x in rep["outputs"]["lines"]) == [4, 20]


def test_hn_quartic_p2():
    code, rep = report("hn", "--preset", "h4-cyclic", "--p", "2")
    assert code == 0
    assert rep["outputs"]["slope"] == {"num": 1, "den": 2}
    assert rep["outputs"]["semistable"] is True


def test_delta_elliptic():
    code, rep = report("delta-elliptic", "--disc", "-7", "--n", "4")
    assert code == 0
    assert rep["outputs"] == [{"coefficient": {"num": 1, "den": 1}, "prime": 2, "qualifier": "exact"}]


def test_delta_surface():
    code, rep = report("delta-surface", "--case", "4", "--p", "5", "--n", "1")
    assert code == 0
    assert rep["outputs"]["coefficient"] == {"num": 1, "den": 3}


def test_delta_surface_lambda():
    code, rep = report("delta-surface", "--case", "8", "--p", "3", "--n", "3", "--lambda", "3,0,0")
    assert code == 0
    assert rep["outputs"]["qualifier"] == "exact"
    assert invoke("delta-surface", "--case", "8", "--p", "3", "--n", "3", "--lambda", "2,2,0")[0] == 1
    assert invoke("delta-surface", "--case", "8", "--p", "3", "--n", "3", "--lambda", "x")[0] == 1


def test_table_p5():
    code, rep = report("table-nine-cases", "--p", "5", "--n", "1")
    assert code == 0
    rows = {r["case"]: r for r in rep["outputs"]}
    assert rows[1]["coefficient"] == {"num": 1, "den": 2}
    assert rows[4]["coefficient"] == {"num": 1, "den": 3}
    assert rows[9]["qualifier"] == "range"


def test_table_p2_case_nine_exact():
    code, rep = report("table-nine-cases", "--p", "2", "--n", "2")
    rows = {r["case"]: r for r in rep["outputs"]}
    assert rows[9]["status"] == "ok" and rows[9]["qualifier"] == "exact"


def test_table_p7_case_nine_unavailable():
    code, rep = report("table-nine-cases", "--p", "7", "--n", "1")
    assert code == 0
    rows = {r["case"]: r for r in rep["outputs"]}
    assert rows[9]["status"] == "unavailable"


def test_table_csv():
    code, text = invoke("table-nine-cases", "--p", "5", "--n", "1", "--csv")
    assert code == 0
    lines = text.strip().splitlines()
    assert lines[0].startswith("case,status")
    assert lines[4].startswith("4,ok,exact,1/3")


def test_csv_only_for_tables():
    assert invoke("delta-surface", "--case", "1", "--p", "5", "--n", "1", "--csv")[0] == 1


def test_weights():
    code, rep = report("weights", "--p", "3", "--h", "4", "--phi", "1,2", "--lambda", "1,0,0,0")
    assert rep["outputs"]["weights"] == {"0": 36, "1": 12, "2": 4, "3": 28}
    assert rep["outputs"]["coefficient"] == {"num": 1, "den": 10}


def test_delta_general(tmp_path):
    path = tmp_path / "desc.json"
    path.write_text(json.dumps({"degree": 2, "primes": [{"nu": 1, "f": 2, "n": 1, "k": 1}]}))
    code, rep = report("delta-general", "--desc", str(path), "--r", "1", "--p", "5")
    assert code == 0
    assert rep["outputs"]["qualifier"] == "lower_bound"
    assert rep["outputs"]["coefficient"] == {"num": 1, "den": 3}
    assert invoke("delta-general", "--desc", str(tmp_path / "missing.json"), "--r", "1", "--p", "5")[0] == 1


def test_verify_appendix_usage_error_for_p3():
    assert invoke("verify-appendix", "--p", "3")[0] == 1


def test_verify_appendix_reports_sets():
    code, rep = report("verify-appendix", "--p", "2")
    verdicts = {v["corank"]: v for v in rep["verification"]}
    assert verdicts[3]["computed"] == [16, 24] and verdicts[3]["pass"]
    assert verdicts[1]["computed"] == [48, 56] and verdicts[1]["pass"]
    assert verdicts[2]["computed"] == [32, 40, 48]
    assert all(v["witnesses_verified"] for v in verdicts.values())
    # exit status is 0 exactly when every comparison passes
    assert (code == 0) == all(v["pass"] for v in verdicts.values())
    assert code == 2


def test_single_corank_that_matches():
    code, rep = report("verify-appendix", "--p", "2", "--corank", "3")
    assert code == 0


def test_precision_exhausted_exit_code():
    assert invoke("lines", "--preset", "h4-cyclic", "--p", "2", "--precision", "40")[0] == 3


def test_usage_errors():
    assert invoke("lines", "--p", "2")[0] == 1
    assert invoke("lines", "--preset", "h4-cyclic", "--p", "3")[0] == 1
    assert invoke("lines", "--preset", "h2-level2", "--p", "4")[0] == 1
    assert invoke("lines", "--preset", "h2-level2", "--p", "3", "--corank", "2")[0] == 1
    assert invoke("delta-elliptic", "--disc", "0", "--n", "2")[0] == 1
    with pytest.raises(SystemExit) as exc:
        run(["no-such-command"])
    assert exc.value.code == 1


def _strip_timing(text):
    rep = json.loads(text)
    rep.pop("timing")
    return json.dumps(rep, sort_keys=True)


@pytest.mark.parametrize(
    "argv",
    [
        ("lines", "--preset", "h4-cyclic", "--p", "2", "--corank", "2"),
        ("hn", "--preset", "h2-level2", "--p", "3"),
        ("table-nine-cases", "--p", "5", "--n", "3"),
        ("verify-appendix", "--p", "2"),
    ],
)
def test_reports_are_deterministic(argv):
    first = invoke(*argv)[1]
    second = invoke(*argv)[1]
    assert _strip_timing(first) == _strip_timing(second)


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "cmkisin", "delta-surface", "--case", "1", "--p", "3", "--n", "2"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["outputs"]["coefficient"] == {"num": 1, "den": 1}
