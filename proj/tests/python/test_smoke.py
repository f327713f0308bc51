"""Smoke tests for the _iifcycles extension module.

Run with PYTHONPATH pointing at the directory containing the built module
(the ctest target python_smoke wires this up automatically).
"""

import json

import _iifcycles as m


def test_verify_iif_symbolic():
    p = "l*x - y + l*m1*x^3 + (m2 - m1 + m1*m2)*x^2*y + l*m1*m2*x*y^2 + m2*y^3"
    q = "x + l*y - x^3 + l*m1*x^2*y + (m1*m2 - m1 - 1)*x*y^2 + l*m1*m2*y^3"
    v = "(x^2 + y^2)*(1 + m1*x^2 + m1*m2*y^2)"
    assert m.verify_iif(p, q, v)
    assert m.iif_residual(p, q, v) == "0"
    assert not m.verify_iif(p, q, "x^2 + y^2 + x^3")


def test_multiplicity():
    f = "y^2 - x^2 + x^3"
    assert m.multiplicity("(" + f + ")^3", f) == 3
    assert m.multiplicity("x^2 + y^2", f) == 0


def test_classify_and_quantities():
    # Hamiltonian fish saddle at the origin: weak, 1:1 resonant.
    info = m.classify_saddle("-2*y", "-2*x + 3*x^2", "0", "0")
    assert not info["strong"]
    assert info["resonance"] == (1, 1)
    sq = m.saddle_quantities("-2*y", "-2*x + 3*x^2", "0", "0", 2)
    assert all(a == "0" for a in sq["alphas"])
    assert "first_nonzero" not in sq


def test_normal_form_obstruction():
    nf = m.resonant_normal_form(
        "-x + 2*y + x^2", "2*x - y - 3*x^2 + (3/2)*x*y", "0", "0", 7
    )
    assert (nf["p"], nf["q"]) == (1, 3)
    assert nf["delta"] != 0
    assert nf["existence_obstruction"]


def test_homoclinic_cyclicity():
    out = m.homoclinic_cyclicity("-2*y", "-2*x + 3*x^2", "0", "0", 1)
    assert out["cyclicity"] == 2


def test_run_builtin_job():
    names = m.builtin_job_names()
    assert "andronov" in names
    report = json.loads(m.run_builtin_job("andronov"))
    assert report["all_ok"]
    kinds = [t["task"] for t in report["tasks"]]
    assert kinds == ["saddle", "normal-form", "verdict"]


def test_run_job_text():
    job = {
        "name": "py-smoke",
        "system": {"p": "-2*y", "q": "-2*x + 3*x^2"},
        "iif": "y^2 - x^2 + x^3",
        "curves": {"loop": "y^2 - x^2 + x^3"},
        "points": {"saddle": ["0", "0"]},
        "tasks": [{"task": "verify-iif"}],
    }
    report = json.loads(m.run_job(json.dumps(job)))
    assert report["all_ok"]
    assert report["tasks"][0]["fields"]["symbolic_residual"] == "0"
