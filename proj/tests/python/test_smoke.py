import math

import pytest

import jacobiwvn as jw


def test_band_structure_matches_known_operator():
    op = jw.PeriodicOperator(a=[1.0, 2.0], b=[0.0, 0.0])
    bands = jw.find_bands(op)
    assert len(bands) == 2
    assert bands[0]["lo"] == pytest.approx(-3.0, abs=1e-8)
    assert bands[0]["hi"] == pytest.approx(-1.0, abs=1e-8)
    assert bands[1]["lo"] == pytest.approx(1.0, abs=1e-8)
    assert bands[1]["hi"] == pytest.approx(3.0, abs=1e-8)


def test_classification_and_quasi_momentum():
    op = jw.PeriodicOperator(a=[1.0], b=[0.0])
    inside = jw.classify(op, 0.5)
    assert inside["class"] == "elliptic"
    assert inside["theta"] == pytest.approx(math.acos(0.25))
    assert jw.classify(op, 5.0)["class"] == "hyperbolic"
    assert jw.quasi_momentum(op, 0.5) == pytest.approx(math.acos(0.25))


def test_resonance_plan_reports_threshold_and_exponent():
    op = jw.PeriodicOperator(a=[1.0], b=[0.0])
    plan = jw.plan_resonance(op, 0.5, case="case1", phi=0.7)
    assert plan["case"] == "case1"
    theta = math.acos(0.25)
    assert plan["exponent_per_c"] == pytest.approx(abs(plan["E"]) / math.sin(theta))
    assert plan["c_threshold"] * plan["exponent_per_c"] == pytest.approx(0.5)


def test_potential_iteration_and_boundedness():
    op = jw.PeriodicOperator(a=[1.0], b=[0.0])
    pot = jw.WvnPotential(terms=[(0.5, 2.0, 0.3)])
    assert pot.q(7) == pytest.approx(0.5 * math.sin(7 * 2.0 + 0.3) / 7)
    trace = jw.iterate(op, pot, 0.5, (1.0, 0.4), 100001)
    assert trace.n_max == 100001
    assert jw.boundedness_check(trace)["verdict"] == "Bounded"


def test_subordination_search_finds_critical_decay():
    op = jw.PeriodicOperator(a=[1.0], b=[0.0])
    plan = jw.plan_resonance(op, 0.5)
    pot = jw.WvnPotential(terms=[(2 * plan["c_threshold"], plan["omega"], plan["phi"])])
    result = jw.subordination_search(op, pot, 0.5, 100000)
    assert result["verdict"] == "Subordinate"
    fit = jw.fit_decay_exponent(result["trace_sub"], 1000, 100000)
    assert fit.gamma == pytest.approx(1.0, abs=0.05)


def test_validation_errors_map_to_value_error():
    with pytest.raises(jw.ValidationError):
        jw.PeriodicOperator(a=[-1.0], b=[0.0])
    with pytest.raises(ValueError):
        jw.PeriodicOperator(a=[1.0], b=[0.0, 0.0])


def test_zygmund_bound_holds():
    chk = jw.zygmund_tail_bound_check(1.7, 5)
    assert chk["ok"]
    assert abs(chk["tail"]) <= chk["bound"] * (1 + 1e-9)
