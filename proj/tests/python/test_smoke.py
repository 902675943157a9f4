import json
import math

import numpy as np
import pytest

import tikrules as tk


def test_scalar_prox_chain():
    # lambda=1, y=1, alpha=1, q=2: x = 0.5, second iterate 0.75
    assert tk.h_q_eval(2.0, 1.0, 3.0) == pytest.approx(6.0)
    assert tk.h_q_invert(1.5, 1.0, 2.0) == pytest.approx(1.0, abs=1e-10)
    s = tk.diag_solve(np.array([1.0]), np.array([1.0]), 2.0, 1.0)
    assert s.x[0] == pytest.approx(0.5)
    assert s.p[0] == pytest.approx(0.5)
    s2 = tk.diag_second(np.array([1.0]), np.array([1.0]), 2.0, 1.0)
    assert s2.x[0] == pytest.approx(0.75)
    assert s2.p[0] == pytest.approx(0.25)


def test_tv_prox():
    v = np.array([0.0, 1.0, 0.0])
    x = tk.tv1d_prox(0.4, v)
    obj = 0.5 * np.sum((x - v) ** 2) + 0.4 * np.sum(np.abs(np.diff(x)))
    assert obj <= 0.5 * np.sum((v - v) ** 2) + 0.4 * 2.0  # beats staying at v
    assert np.all(np.diff(tk.tv1d_prox(10.0, v)) == pytest.approx(0.0))


def test_rule_curve_orderings():
    lam = 1.0 / np.arange(1.0, 13.0) ** 2
    xd = np.array([(-1.0) ** i / (i + 1.0) ** 3 for i in range(12)])
    A = tk.LinearOperator.diagonal(lam)
    y = A.apply(xd)
    rng = np.random.default_rng(5)
    e = rng.standard_normal(12)
    e *= 0.01 * np.linalg.norm(y) / np.linalg.norm(e)
    yd = y + e
    prob = tk.Problem(A, xd, yd, float(np.linalg.norm(yd - y)),
                      tk.RegularizerSpec.power_lq(1.5))
    grid = tk.build_grid(A, 10)
    curve = tk.rule_curve(prob, grid)
    hd = np.array(curve.psi(tk.Rule.HD))
    hr = np.array(curve.psi(tk.Rule.HR))
    sqo = np.array(curve.psi(tk.Rule.SQO))
    rqo = np.array(curve.psi(tk.Rule.RQO))
    assert np.all(hr >= -1e-10)
    assert np.all(sqo <= hr + 1e-10)
    assert np.all(hr <= hd + 1e-10)
    assert np.all(rqo <= 2.0 * hd + 1e-8)
    for rule in (tk.Rule.HD, tk.Rule.HR, tk.Rule.SQO, tk.Rule.RQO):
        assert grid.alpha_min < curve.alpha_star(rule) < grid.alpha_max


def test_classifier():
    r = tk.regime_classify(4.0, 6.0, 1.0, 1.5)
    assert r.status == tk.RegimeStatus.Satisfied
    assert r.kappa_threshold == pytest.approx(4.0 + 2.0 / 3.0)
    assert tk.regime_classify(2.0, 3.0, 2.9, 1.2).status == tk.RegimeStatus.Violated
    assert (tk.regime_classify(4.0, 6.0, 1.0, 1.2, tk.Rule.HR).status
            == tk.RegimeStatus.NotCovered)
    warned = tk.regime_classify(4.0, 2.0, 1.0, 1.5)
    assert not warned.assumptions_met


def test_noise_determinism():
    y = np.arange(1.0, 9.0)
    a = tk.gen_noise(y, 0.01, 1.0, 7)
    b = tk.gen_noise(y, 0.01, 1.0, 7)
    assert np.array_equal(a, b)
    assert np.linalg.norm(a) == pytest.approx(0.01 * np.linalg.norm(y), rel=1e-12)


def test_experiment_roundtrip(tmp_path):
    cfg = tmp_path / "exp.toml"
    cfg.write_text(
        """
[problem]
kind = "diagonal"
n = 20
beta = 4.0
nu = 2.0
sign_seed = 7

[regularizer]
kind = "lq"
q = 1.5

[noise]
levels = 3
seed = 11
kappa = 1.0

[grid]
points_per_decade = 6
"""
    )
    out = tmp_path / "out"
    rep = tk.run_experiment(cfg, out)
    assert len(rep["rows"]) == 12
    for row in rep["rows"]:
        assert row["efficiency"] >= 1.0 - 1e-9
    assert (out / "report.csv").exists()
    data = json.loads((out / "report.json").read_text())
    assert data["rows"] == rep["rows"]


def test_condition_probes():
    m = tk.DiagonalModel(n=20, beta=4.0, nu=2.0, kappa=1.0, q=1.5)
    entry = tk.muckenhoupt_check(m, 1e-4, 1e-2, 1.0, tk.ConditionKind.MuckHD)
    assert entry.lhs >= 0.0 and entry.rhs > 0.0
    rep = tk.nonnegativity_probe(1.5, 5000, 3)
    assert rep.violations_hr == 0 and rep.violations_sqo == 0
    lc = tk.lemma_constants(1.5)
    assert lc.q_star == pytest.approx(3.0)
    assert lc.d_lo == pytest.approx(2.0, abs=1e-5)
    assert lc.d_up == pytest.approx(2.0 * (math.sqrt(2.0) - 1.0), abs=1e-5)
