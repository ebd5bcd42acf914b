import json
from fractions import Fraction

import pytest

from feikit import construct
from feikit.cli import main, parse_construct
from feikit.errors import BadParams
from feikit.io import format_truth_table
from feikit.partitions import min_aUC_exact
from feikit.polyforms import BlockMultilinearForm

import oracles

H = Fraction(1, 2)
FLAT = BlockMultilinearForm(2, 2, [[0, 3], [1, 2]], {0b0011: H, 0b0101: H, 0b1010: H, 0b1100: -H})


def run(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as exc:
        # argparse usage errors exit directly
        code = exc.code
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


@pytest.fixture
def and2_file(tmp_path):
    p = tmp_path / "and2.txt"
    p.write_text(format_truth_table(construct("and", n=2)))
    return str(p)


def test_wht(capsys, and2_file):
    out = run_json(capsys, "wht", "--fn", and2_file)
    f = construct("and", n=2)
    assert out["n"] == 2 and out["degree"] == 2
    assert json.dumps(out["coeffs"]) and out["scale"] == "2^2"
    assert run_json(capsys, "wht", "--construct", "and:n=2") == out
    assert [out["coeffs"].get(str(S), 0) for S in range(4)] == oracles.fourier(f)


def test_measures(capsys):
    out = run_json(capsys, "measures", "--construct", "and:n=2", "--renyi", "0.5,2")
    f = construct("and", n=2)
    assert out["shannon_entropy"] == pytest.approx(oracles.entropy(f))
    assert out["min_entropy"] == pytest.approx(oracles.min_entropy(f))
    assert Fraction(out["total_influence"]) == oracles.total_influence(f)


def test_certificates_and_parity(capsys):
    out = run_json(capsys, "certificates", "--construct", "and:n=2", "--per-input")
    assert out["C_min"] == 1
    out = run_json(capsys, "parity-cert", "--construct", "inner_product:n=4")
    assert out["C_min_parity"] == 2 and out["min_entropy"] == pytest.approx(4.0)
    assert out["min_entropy_bound_holds"]
    out = run_json(capsys, "parity-cert", "--construct", "inner_product:n=4", "--x", "0")
    assert out["C_parity"] == oracles.parity_certificate_at(construct("inner_product", n=4), 0)
    out = run_json(capsys, "parity-cert", "--construct", "and:n=2", "--x=-1,-1")
    assert out["x"] == [-1, -1] and out["C_parity"] == 2


def test_partitions(capsys, tmp_path):
    f = construct("and", n=2)
    auc, part = min_aUC_exact(f)
    p = tmp_path / "part.json"
    p.write_text(json.dumps(part.to_json()))
    out = run_json(capsys, "verify-partition", "--construct", "and:n=2", "--partition", str(p))
    assert Fraction(out["auc"]) == auc == Fraction(3, 2) and out["entropy_bound_holds"]
    out = run_json(capsys, "min-auc", "--construct", "and:n=2")
    assert out["exact"] and Fraction(out["auc"]) == Fraction(3, 2)
    out = run_json(capsys, "min-auc", "--construct", "inner_product:n=4", "--heuristic", "--mode", "affine")
    assert not out["exact"] and out["entropy_bound_holds"]
    # a cell that is not monochromatic
    p.write_text(json.dumps({"n": 2, "cells": [{"fixed": {}, "value": -1}]}))
    code, _, err = run(capsys, "verify-partition", "--construct", "and:n=2", "--partition", str(p))
    assert code == 2 and err


def test_aep_demo(capsys):
    out = run_json(capsys, "aep-demo", "--construct", "and:n=2", "--M", "1,2", "--trials", "2000")
    assert len(out["claims"]) == 2 and out["coverage_ok"]
    assert Fraction(out["auc"]) == Fraction(3, 2)


def test_lp_commands(capsys):
    out = run_json(capsys, "lp-norm", "--construct", "and:n=2", "--eps", "0", "--deg", "2", "--exact", "--check")
    assert Fraction(out["optimum"]) == 2 and out["min_entropy_bound_holds"]
    out = run_json(capsys, "lp-norm", "--construct", "and:n=2", "--eps", "1/3", "--dual")
    assert out["degree"] == 2 and len(out["dual"]) == 4
    out = run_json(capsys, "approx-degree", "--construct", "and:n=2", "--eps", "1/3")
    assert out["degree"] == 2
    code, _, err = run(capsys, "lp-norm", "--construct", "and:n=2", "--eps", "1/3", "--deg", "1")
    assert code == 2 and err


def test_mansour(capsys, tmp_path):
    p = tmp_path / "f.dnf"
    p.write_text("n=6\nx1 & x2 & x3 & x4 | x5 & !x6\n")
    out = run_json(capsys, "mansour", "--dnf", str(p), "--eps", "1/4")
    assert Fraction(out["error"]) <= Fraction(1, 4)
    p.write_text("x1 &\n")
    code, _, err = run(capsys, "mansour", "--dnf", str(p), "--eps", "1/4")
    assert code == 2 and "position" in err


def test_forms(capsys, tmp_path):
    p = tmp_path / "form.json"
    p.write_text(json.dumps(FLAT.to_json()))
    out = run_json(capsys, "bh", "--form", str(p))
    assert out["norm"] == pytest.approx(1.0) and out["holds"]
    out = run_json(capsys, "reconstruct", "--form", str(p))
    assert out["n"] == 4


def test_scan_outputs(capsys, tmp_path):
    code, out, _ = run(capsys, "scan", "--n", "2", "--checks", "granularity", "--format", "csv", "--threads", "2")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "id,n,table,constant,parseval_holds,granularity_holds,errors" and len(lines) == 17
    code, out2, _ = run(capsys, "--format", "csv", "scan", "--n", "2", "--checks", "granularity")
    assert out2 == out
    dest = tmp_path / "r.json"
    code, out, _ = run(capsys, "scan", "--n", "1", "-o", str(dest), "--timing")
    assert code == 0 and out == ""
    data = json.loads(dest.read_text())
    assert data["schema"] == "feikit.scan/1" and "runtime" in data and len(data["records"]) == 4


@pytest.mark.parametrize("argv, code", [
    ([], 1),
    (["nope"], 1),
    (["wht"], 2),
    (["wht", "--construct", "and:n=2", "--fn", "x"], 2),
    (["wht", "--fn", "/nonexistent/table"], 2),
    (["wht", "--construct", "bogus:n=2"], 2),
    (["lp-norm", "--construct", "and:n=2", "--eps", "abc"], 1),
    (["wht", "--construct", "and:n=2", "--format", "csv"], 1),
    (["scan", "--n", "2", "--threads", "0"], 1),
    (["scan", "--n", "7"], 2),
    (["parity-cert", "--construct", "and:n=9"], 3),
    (["lp-norm", "--construct", "and:n=11", "--eps", "0.1", "--deg", "1"], 3),
])
def test_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_parse_construct():
    assert parse_construct("tribes:w=2,s=2") == construct("tribes", w=2, s=2)
    with pytest.raises(BadParams):
        parse_construct("and:n")
