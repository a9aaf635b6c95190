import math

import numpy as np
import pytest

import fronfix


def test_classical_price_matches_tree():
    p = fronfix.ModelParams(r=0.1, sigma=0.2, E=1.0, T=1.0, alpha=1.0)
    run = fronfix.run_solver(p, M=200, mu=20.0, Y=4.0)
    tree = fronfix.binomial_american_put(p, 1.0, 2000)
    assert abs(run.price_at(1.0) - tree) < 1e-2
    assert run.price_at(1.0) >= fronfix.european_put(p, 1.0)


def test_surface_shapes_and_closure():
    p = fronfix.ModelParams(alpha=0.7)
    run = fronfix.run_solver(p, M=30, mu=20.0)
    g = run.grid
    assert run.v.shape == (g.N + 1, g.M + 1)
    assert run.xf.shape == (g.N + 1,)
    assert run.xf[0] == 1.0
    np.testing.assert_array_equal(run.v[1:, 0], 1.0 - run.xf[1:])
    assert np.all(run.v[:, -1] == 0.0)
    assert math.isclose(g.horizon, g.N * g.dtau)
    assert run.variant == "consistent"


def test_analysis_helpers():
    p = fronfix.ModelParams()
    g = fronfix.build_grid(p, 40, 20.0, 4.0)
    assert fronfix.lemma1_check(p, g)["compliant"]
    run = fronfix.run_solver(p, 40, 20.0, 4.0)
    assert fronfix.monotonicity_audit(run)["ok"]
    lam = fronfix.amplification_factor(p, g, b=math.pi / g.dy, a=1.0, n=10)
    assert abs(lam) < 1.0


def test_psor_returns_boundary():
    p = fronfix.ModelParams()
    price, boundary = fronfix.psor_american_put(p, 1.0, nodes=200, steps=200)
    assert price > 0.04
    assert 0.8 < boundary < 0.9


def test_errors_are_typed():
    with pytest.raises(ValueError, match="sigma must be positive"):
        fronfix.run_solver(fronfix.ModelParams(sigma=-1.0))
    with pytest.raises(fronfix.NumericalError, match="step 1"):
        fronfix.run_solver(fronfix.ModelParams(alpha=0.6), M=50, variant="published")
    with pytest.raises(ValueError):
        fronfix.run_solver(fronfix.ModelParams(), variant="nope")
