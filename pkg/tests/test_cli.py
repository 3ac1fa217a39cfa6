import io
import json
import subprocess
import sys

import pytest

from geolink.bqf import FormClass
from geolink.cli import run
from geolink.cycles import ZeroCycle
from geolink.exact import parse_rat, parse_symt
from geolink.gamma15 import GeodesicCycle


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def jlines(s):
    return [json.loads(x) for x in s.splitlines() if x.strip()]


def test_classgroup_json_roundtrip():
    code, out, _ = call("classgroup", "--disc", "-23", "--json")
    assert code == 0
    rows = jlines(out)
    assert len(rows) == 3
    assert [FormClass.from_json(r).to_json() for r in rows] == rows


def test_traverse_negative_literal():
    code, out, _ = call("traverse", "--form", "-3,-11,9", "--json")
    assert code == 0
    obj = jlines(out)[0]
    assert obj["length"] == 9 and obj["homology"] == [-5, -1, 1]
    cyc = GeodesicCycle.from_json(obj)
    assert cyc.to_json() == {k: obj[k] for k in ("disc", "forms", "homology")}


def test_traverse_csv_segments():
    code, out, _ = call("traverse", "--form", "1,0,-3", "--csv")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0].startswith("form,centre,radius2")
    assert len(lines) == 1 + 5


def test_series_and_json():
    code, out, _ = call("series", "--max-det", "15", "--cycles", "-3,-11,9", "--nonsquare",
                        "--json")
    assert code == 0
    rows = jlines(out)
    assert [int(r["value"]) for r in rows] == [8, 24, 16, 2, -4, -4, 8, 4, -32]
    for r in rows:
        assert set(r) == {"T", "det", "value", "surface_dependent"}
        assert parse_symt(r["T"]).det == parse_rat(r["det"])
    code2, text, _ = call("series", "--max-det", "15", "--cycles", "c₃′", "--nonsquare")
    assert code2 == 0 and text.splitlines()[0].split() == ["t1", "t2", "t0", "iota"]


def test_winding_mcoeff_link():
    assert jlines(call("winding", "--form", "2,-1,1", "--cycles", "c2", "--json")[1])[0][
        "total"] == "1"
    ms = jlines(call("mcoeff", "--T", "2,1/2,3", "--json")[1])
    assert [r["m"] for r in ms] == [0, 0, 2]
    link = jlines(call("link", "--T", "2,1/2,3", "--json")[1])[0]
    assert link["iota_prime"] == "8"
    supported = [c for c in link["classes"] if c["m"]]
    assert supported == [{"form": "2,1,3", "m": 2, "winding_sums": ["0", "0", "4"]}]
    full = jlines(call("linkfull", "--T", "2,1/2,3", "--json")[1])[0]
    assert full["iota"] == "8"


def test_zerocycle_roundtrip():
    code, out, _ = call("zerocycle", "--T", "2,1/2,3", "--json")
    obj = jlines(out)[0]
    zc = ZeroCycle.from_json(obj)
    assert zc.degree() == 0 == obj["degree"] and len(zc.points) == 24


def test_growth_and_reduce():
    g = jlines(call("growth", "--max-det", "15", "--cycles", "c3", "--nonsquare", "--json")[1])[0]
    assert g["argmax"] == "2,1/2,4" and g["max_ratio"] == pytest.approx(1.1123941286819607)
    r = jlines(call("reduce", "--form", "3,-1,2", "--json")[1])[0]
    assert r["reduced"] == "2,1,3"


def test_analytic_commands():
    k = jlines(call("k0", "--x", "1", "--json")[1])[0]
    assert k["value"] == pytest.approx(0.42102443824070834, abs=1e-12)
    w = jlines(call("wstar", "--x1", "-1", "--x2", "2", "--tol", "1e-12", "--json")[1])[0]
    assert 0 < w["value"] <= w["bound"] and w["err"] <= 1e-12
    rho = jlines(call("rho", "--gram", "5,-1/2,-11", "--T", "5,1/2,-11", "--json")[1])[0]
    assert rho["rho"] == -2
    b = jlines(call("beta", "--gram", "5,-1/2,-11", "--T", "6,-5,-4", "--v", "0.1,0,0.1",
                    "--theta", "1,1/2,1", "--trunc-tol", "1e-9", "--json")[1])[0]
    assert b["err"] < 1e-9 and b["value"] == pytest.approx(6.4785e-05, rel=1e-4)


def test_selftest():
    code, out, _ = call("selftest", "--json")
    assert code == 0
    assert all(r["ok"] for r in jlines(out))


@pytest.mark.parametrize("argv", [["traverse", "--form", "1,2"], ["nosuch"],
                                  ["series", "--max-det", "15", "--bogus"],
                                  ["mcoeff", "--T", "1,x,2"], ["classgroup"],
                                  ["rho", "--gram", "1,0,-2", "--T", "1,0,-1", "--shift", "0,0"]])
def test_usage_errors(argv, capsys):
    code, _, _ = call(*argv)
    assert code == 2


@pytest.mark.parametrize("argv", [["traverse", "--form", "1,2,3"], ["traverse", "--form", "1,1,0"],
                                  ["classgroup", "--disc", "5"], ["reduce", "--form", "1,3,1"],
                                  ["mcoeff", "--T", "1,2,1"],
                                  ["rho", "--gram", "1,0,1", "--T", "1,0,-1"],
                                  ["wstar", "--x1", "1", "--x2", "0"]])
def test_domain_errors(argv):
    code, out, err = call(*argv)
    assert code == 1 and out == ""
    obj = json.loads(err)
    assert set(obj) == {"error", "message"}


def test_console_script():
    p = subprocess.run([sys.executable, "-m", "geolink.cli", "classgroup", "--disc", "-23"],
                       capture_output=True, text=True)
    assert p.returncode == 0 and "2,1,3" in p.stdout
