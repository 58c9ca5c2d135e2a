import io
import json
import math

import jsonschema
import pytest

from fmellin.mellin_engine import MellinQuery
from fmellin.series_kernel import Binomial, Exponential, Geometric
from fmellin.verify_harness import (
    REPORT_SCHEMA,
    SWEEP_HEADER,
    VerificationCase,
    paper_suite_cases,
    report_json,
    run_case,
    run_paper_suite,
    run_suite,
    sweep_parameter,
    write_report,
    write_sweep_csv,
)

BINOMIAL_RESIDUAL = 0.0601360069540332430628671316755


@pytest.fixture(scope="module")
def report():
    return run_paper_suite()


def _row(report, case_id):
    return next(r for r in report["cases"] if r["id"] == case_id)


def test_paper_suite_all_pass(report):
    failing = [r["id"] for r in report["cases"] if not r["pass"]]
    assert failing == []
    assert report["suite"] == "paper"


def test_schema(report):
    jsonschema.validate(json.loads(report_json(report)), REPORT_SCHEMA)


def test_self_consistency(report):
    rows = report["cases"]
    s = report["summary"]
    assert s["n_pass"] == sum(r["pass"] for r in rows)
    assert s["n_fail"] == len(rows) - s["n_pass"]
    assert s["max_rel_err"] == max(r["rel_err"] for r in rows)
    for r in rows:
        assert r["abs_err"] >= 0 and r["rel_err"] >= 0


def test_pass_rule(report):
    cases = {c.id: c for c in paper_suite_cases()}
    for r in report["cases"]:
        assert r["pass"] == (r["rel_err"] <= cases[r["id"]].tolerance)


def test_rows_sorted_by_id(report):
    ids = [r["id"] for r in report["cases"]]
    assert ids == sorted(ids)


def test_determinism(report):
    again = run_paper_suite()
    a = dict(report, timestamp=None)
    b = dict(again, timestamp=None)
    assert report_json(a) == report_json(b)


def test_suite_contents(report):
    ids = {r["id"] for r in report["cases"]}
    assert "geo-k5-quadrature-2.03328" in ids
    assert "geo-k5-paper-literal-ratio" in ids
    assert sum(i.startswith("exp-exact-") for i in ids) == 25
    assert any(i.startswith("binomial-k2-theorem1-residual") for i in ids)
    assert any(i.startswith("catalan-") and "residual" in i for i in ids)
    assert any(i.startswith("complement-") for i in ids)
    assert any(i.startswith("band-additivity-") for i in ids)
    assert any(i.startswith("dirichlet-") for i in ids)


def test_paper_point_rows(report):
    r = _row(report, "geo-k5-quadrature-2.03328")
    assert abs(r["values"]["quadrature"] - 2.03328) < 1e-5
    r = _row(report, "geo-k5-substitution-vs-quadrature")
    assert r["rel_err"] <= 1e-7
    r = _row(report, "geo-k5-paper-literal-ratio")
    assert r["values"]["ratio"] == pytest.approx(5.0, abs=1e-3)


def test_binomial_expected_discrepancy(report):
    r = _row(report, "binomial-k2-theorem1-residual-t0.5")
    assert r["values"]["residual"] == pytest.approx(BINOMIAL_RESIDUAL, abs=1e-6)
    assert "expected discrepancy" in r["note"]


def test_catalan_printed_reading_reported(report):
    r = _row(report, "catalan-mu3-theorem1-residual-s1-t0.2")
    assert "theorem1_printed" in r["values"]
    assert r["values"]["theorem1_printed"] != r["values"]["theorem1"]


def test_antisymmetry_rows_pass(report):
    rows = [r for r in report["cases"] if r["id"].startswith("antisymmetry-")]
    assert len(rows) >= 5 and all(r["pass"] for r in rows)


def test_run_case_examples():
    geo5 = Geometric(k=5.0)
    r = run_case(VerificationCase("paper", MellinQuery(geo5, 0.5, 100.0),
                                  ("substitution_geo",), tolerance=1e-7, oracle="quadrature"))
    assert r["pass"] and r["rel_err"] <= 1e-7
    r = run_case(VerificationCase("exp", MellinQuery(Exponential(), 1.0, 1.0), ("theorem1",),
                                  tolerance=1e-11, oracle="quadrature"))
    assert r["pass"] and r["rel_err"] <= 1e-11
    r = run_case(VerificationCase("bin", MellinQuery(Binomial(k=2.0), 1.0, 0.5), ("theorem1",),
                                  oracle="termwise"))
    assert not r["pass"]
    assert r["abs_err"] == pytest.approx(BINOMIAL_RESIDUAL, abs=1e-6)


def test_auto_oracle_includes_both():
    r = run_case(VerificationCase("x", MellinQuery(Binomial(k=2.0), 1.0, 0.5), ("theorem1",)))
    assert {"quadrature", "termwise"} <= set(r["values"])
    assert r["oracle"] == r["values"]["termwise"]


def test_error_becomes_failed_row():
    geo = Geometric(k=2.0)
    r = run_case(VerificationCase("pole", MellinQuery(geo, 2.0, 1.0), ("theorem1",)))
    assert r["pass"] is False and r["rel_err"] is None
    assert "PoleError" in r["note"]
    rep = run_suite("mixed", [
        VerificationCase("pole", MellinQuery(geo, 2.0, 1.0), ("theorem1",)),
        VerificationCase("ok", MellinQuery(Exponential(), 1.0, 1.0), ("theorem1",)),
    ])
    assert rep["summary"] == {"n_pass": 1, "n_fail": 1,
                              "max_rel_err": rep["cases"][0]["rel_err"]}
    assert [r["id"] for r in rep["cases"]] == ["ok", "pole"]
    jsonschema.validate(json.loads(report_json(rep)), REPORT_SCHEMA)


def test_small_oracle_switches_to_absolute():
    # theorem2 on exp at large t: the oracle is about e^-40 < 1e-8
    q = MellinQuery(Exponential(), 1.0, math.inf, lower=40.0, method="theorem2")
    r = run_case(VerificationCase("tiny", q, ("theorem2",), tolerance=1e-12,
                                  oracle="quadrature"))
    assert r["rel_err"] == r["abs_err"]


def test_case_validation():
    q = MellinQuery(Exponential(), 1.0, 1.0)
    with pytest.raises(ValueError):
        VerificationCase("x", q, ())
    with pytest.raises(ValueError):
        VerificationCase("x", q, ("theorem1",), kind="nope")
    with pytest.raises(ValueError):
        run_suite("dup", [VerificationCase("a", q, ("theorem1",))] * 2)


def test_sweep_geometric_monotone():
    rows = sweep_parameter(Geometric(k=5.0), "t", [1, 2, 5, 10, 100], s=0.5,
                           method="substitution_geo")
    rel = [r["rel_err"] for r in rows]
    assert [r["t"] for r in rows] == [1.0, 2.0, 5.0, 10.0, 100.0]
    assert rel[-1] <= 1e-7
    assert all(b <= a for a, b in zip(rel, rel[1:]))


def test_sweep_exponential_exact():
    rows = sweep_parameter(Exponential(), "t", [0.1, 1, 5, 20, 50], s=1.7)
    assert all(r["rel_err"] <= 1e-11 for r in rows)
    rows = sweep_parameter(Exponential(), "s", [0.1, 0.5, 2, 9], t=3.0)
    assert all(r["rel_err"] <= 1e-11 for r in rows)
    assert all(r["t"] == 3.0 and isinstance(r["t"], float) for r in rows)


def test_sweep_binomial_residuals():
    rows = sweep_parameter(Binomial(k=2.0), "t", [0.25, 0.5], s=1)
    for r in rows:
        t = r["t"]
        expected = abs((1 - math.exp(-t)) - t / (1 + t))
        assert abs(r["value"] - r["oracle"]) == pytest.approx(expected, abs=1e-12)
    assert abs(rows[1]["value"] - rows[1]["oracle"]) == pytest.approx(BINOMIAL_RESIDUAL, abs=1e-7)


def test_sweep_records_point_errors():
    rows = sweep_parameter(Binomial(k=2.0), "s", [1.0, 2.0, 2.5], t=0.5)
    assert rows[0]["rel_err"] is not None
    assert "PoleError" in rows[1]["error"] and rows[1]["value"] is None


def test_sweep_validation():
    with pytest.raises(ValueError):
        sweep_parameter(Exponential(), "t", [2, 1], s=1)
    with pytest.raises(ValueError):
        sweep_parameter(Exponential(), "x", [1, 2], s=1)
    with pytest.raises(ValueError):
        sweep_parameter(Exponential(), "t", [1, 2])


def test_sweep_csv():
    rows = sweep_parameter(Binomial(k=2.0), "s", [1.0, 2.0], t=0.5)
    buf = io.StringIO()
    write_sweep_csv(rows, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == ",".join(SWEEP_HEADER)
    assert lines[1].startswith("binomial,1.0,0.5,theorem1,")
    assert lines[2] == "binomial,2.0,0.5,theorem1,,,"


def test_write_report(tmp_path, report):
    path = tmp_path / "r.json"
    write_report(report, str(path))
    assert json.loads(path.read_text()) == json.loads(report_json(report))
    assert [p.name for p in tmp_path.iterdir()] == ["r.json"]
