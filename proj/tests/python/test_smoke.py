import math

import pytest

ldefront = pytest.importorskip("ldefront")


def test_linear_speeds():
    c = ldefront.critical_speed([-1.0, 2.0], [1.0])
    assert abs(c - 4.31107) <= 1e-4
    b = ldefront.stability_threshold([-1.0, 2.0], [1.0])
    assert abs(b - 3 * math.sqrt(3) / math.pi) <= 1e-9
    assert b < 2.0 < c


def test_catalog_and_model_call():
    assert "vanzon" in ldefront.catalog_names()
    m = ldefront.catalog("vanzon")
    assert m.kappa == [1.0]
    assert m.grad0 == [-1.0, 2.0]
    assert m([0.0, 1.0]) == 1.0
    with pytest.raises(ValueError):
        ldefront.catalog("nosuch")
    with pytest.raises(ValueError):
        m([0.0])
    p = ldefront.catalog("exB2", {"alpha": 0.25, "eps": 0.01})
    assert p.params == {"alpha": 0.25, "eps": 0.01}


def test_model_config_text():
    m = ldefront.parse_model_config("g = -s0 + 2*s1 - s1^2\nkappa = 1\nbeta = -1, 2\n")
    assert m.beta == [-1.0, 2.0]
    with pytest.raises(ValueError):
        ldefront.parse_model_config("colour = red\n")


def test_classification_regimes():
    m = ldefront.catalog("vanzon")
    fast = ldefront.classify(m, 6.0)
    assert fast.kind == "MonotoneFront" and fast.is_front and fast.monotone
    assert ldefront.classify(m, 4.2).kind == "OscillatoryFront"
    assert ldefront.classify(m, 1.0).kind == "Unbounded"
    kind, phi = ldefront.profile(m, 6.0, [-1.0, 0.0, 200.0])
    assert kind == "MonotoneFront"
    assert phi[0] < 1.0 and phi[1] < 1.0 and abs(phi[2]) < 1e-3


def test_bisection_and_scan():
    m = ldefront.catalog("vanzon")
    r = ldefront.find_c_m(m)
    assert r["converged"]
    assert r["lo"] - 1e-3 <= ldefront.critical_speed([-1.0, 2.0], [1.0]) <= r["hi"] + 1e-3
    rows = ldefront.scan(m, [1.0, 6.0], workers=1)
    assert rows == [(1.0, "Unbounded"), (6.0, "MonotoneFront")]


def test_hypotheses_and_lattice():
    clauses = ldefront.check_hypotheses(ldefront.catalog("vanzon"), n_grid=16)
    assert clauses["G1.1"] == "verified-on-grid"
    assert clauses["G3"] == "violated"
    speed, residual = ldefront.lattice_speed(ldefront.catalog("vanzon"), "front-profile", t_end=20.0, front_c=6.0)
    assert abs(speed - 6.0) <= 0.06
    assert residual >= 0.0


def test_expressions():
    e = ldefront.Expr.parse("-s0 + 2*s1 - s1^2")
    assert e.eval([0.0, 1.0]) == 1.0
    assert e.grad([0.0, 0.0]) == [-1.0, 2.0]
    with pytest.raises(ValueError):
        ldefront.Expr.parse("s0 + (")
