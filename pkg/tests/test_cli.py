import csv
import io
import json
import shutil

import pytest

from exzeros import cli


def run(*argv):
    out = io.StringIO()
    code = cli.run(list(argv), out)
    return code, out.getvalue()


def test_bn_validation_exit_code():
    code, _ = run("bn", "--q", "4", "--N", "683")
    assert code == 2


def test_bn_text_and_json():
    code, text = run("bn", "--q", "2", "--N", "7")
    assert code == 0 and text.strip() == "B_N(t, theta) = t^6 + t^5 + t^3 + theta"
    code, text = run("bn", "--q", "2", "--N", "7", "--json")
    obj = json.loads(text)
    assert obj["r"] == 1 and obj["N"] == 7


def test_bs_and_bc():
    assert run("bs", "--q", "2", "--s", "3") == (0, "BB_3 = theta + t1*t2 + t1*t3 + t2*t3\n")
    code, text = run("bc", "--q", "2", "--n", "3")
    assert code == 0 and "BC_3" in text
    code, a = run("bc", "--q", "2", "--via-bn", "--N", "7", "--d", "4")
    _, b = run("bc", "--q", "2", "--n", "9")
    assert code == 0 and a.split("=")[1] == b.split("=")[1]


def test_budget_errors_exit_2():
    assert run("bc", "--q", "2", "--n", "500")[0] == 2
    assert run("powersum", "--q", "5", "--d", "3", "--N", "200", "--method", "brute", "--budget", "100")[0] == 2


def test_bad_field_exit_2():
    assert run("bn", "--p", "2", "--modulus", "1,0,1", "--N", "7")[0] == 2
    assert run("bn", "--q", "6", "--N", "7")[0] == 2


def test_env_override(monkeypatch):
    monkeypatch.setenv("EXZEROS_Q", "3")
    code, text = run("bn", "--N", "13")
    assert code == 0 and text.strip() == "B_N(t, theta) = 1"


def test_reproduce_paper_matches_golden():
    code, text = run("reproduce-paper", "--q", "4")
    assert code == 0
    assert "bn_q4_N682.txt: match" in text and "small_bs_q4.txt: match" in text


def test_reproduce_paper_detects_mismatch(tmp_path, monkeypatch):
    shutil.copytree(cli.GOLDEN_DIR, tmp_path / "golden")
    f = tmp_path / "golden" / "small_bs_q2.txt"
    f.write_text(f.read_text().replace("BB_3 = theta", "BB_3 = theta^2"))
    monkeypatch.setattr(cli, "GOLDEN_DIR", str(tmp_path / "golden"))
    code, text = run("reproduce-paper", "--q", "2")
    assert code == 1 and "MISMATCH" in text


def test_verify_is_deterministic_across_jobs():
    a = run("verify", "--suite", "structure", "--q", "3", "--nmax", "30", "--jobs", "1")
    b = run("verify", "--suite", "structure", "--q", "3", "--nmax", "30", "--jobs", "4")
    assert a == b and a[0] == 0


def test_verify_formats():
    code, text = run("verify", "--suite", "bs", "--q", "2", "--json")
    obj = json.loads(text)
    assert code == 0 and all(r["verdict"] == "pass" for r in obj["records"])
    code, text = run("verify", "--suite", "bs", "--q", "2", "--csv")
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["id", "inputs", "verdict", "witness"] and len(rows) > 1


def test_verify_single_N_modes():
    code, text = run("verify", "--q", "2", "--theorem12", "--N", "7", "--dmax", "5")
    assert code == 0 and text.endswith("6/6 checks passed\n")
    code, text = run("verify", "--q", "3", "--digit-principle", "--N", "7")
    assert code == 0


def test_scan_append_only(tmp_path):
    out = tmp_path / "scan.jsonl"
    code, _ = run("scan", "--q", "2", "--N", "7", "--drange", "3..4", "--out", str(out))
    assert code == 0
    lines = out.read_text().splitlines()
    recs = [json.loads(x) for x in lines]
    assert [r["d"] for r in recs] == [3, 3, 4, 4, 4]
    # within a degree, primes are in ascending coefficient order
    assert [r["P"] for r in recs if r["d"] == 4] == ["theta^4 + theta + 1", "theta^4 + theta^3 + 1", "theta^4 + theta^3 + theta^2 + theta + 1"]
    run("scan", "--q", "2", "--N", "7", "--drange", "3..5", "--out", str(out))
    again = out.read_text().splitlines()
    assert again[: len(lines)] == lines and len(again) == len(lines) + 6
    run("scan", "--q", "2", "--N", "7", "--drange", "3..5", "--out", str(out))
    assert out.read_text().splitlines() == again


def test_scan_empty_range(tmp_path):
    out = tmp_path / "e.jsonl"
    assert run("scan", "--q", "2", "--N", "7", "--drange", "5..4", "--out", str(out))[0] == 0
    assert out.read_text() == ""


def test_unknown_subcommand():
    with pytest.raises(SystemExit) as e:
        cli.main(["nosuch"])
    assert e.value.code == 2
