import math

import numpy as np
import pytest
from scipy import integrate

from nonlocal_bvp.config import RunConfig
from nonlocal_bvp.grid import Grid
from nonlocal_bvp.levy_measure import compound_poisson, fractional, symbol, tempered, truncate
from nonlocal_bvp.nonlinearities import Nonlinearity, burgers, identity
from nonlocal_bvp.scenarios import residual_constant
from nonlocal_bvp.solver import solve_direct
from nonlocal_bvp.verifier import TestFunctionFamily as Family
from nonlocal_bvp.verifier import (BoundaryLayer, Bump, PairIdentityFailure,
                                   boundary_pair_gate, check_boundary_condition,
                                   check_boundary_integrability, check_energy,
                                   check_entropy_inequalities, check_mean_lemma, inner_operator,
                                   mean_lemma_trial, random_v_shape, required_residual_constant,
                                   smooth_step, smooth_step_prime, standard_k_grid)


def solved(name, N=100, **overrides):
    p = RunConfig.from_preset(name, **overrides).problem(N=N)
    return p, solve_direct(p)


def entropy_report(field, C_res=8.0, k_grid=None):
    p = field.problem
    fam = Family.standard(p.grid, p.T)
    ks = standard_k_grid(*field.info["data_range"]) if k_grid is None else k_grid
    return check_entropy_inequalities(field, fam, ks, C_res=C_res)


# ------------------------------------------------------------ smooth pieces

def test_smooth_step_and_derivative():
    s = np.linspace(-0.5, 1.5, 2001)
    y = smooth_step(s)
    assert y[s <= 0].max() == 0.0 and y[s >= 1].min() == 1.0
    assert np.all(np.diff(y) >= 0)
    h = 1e-6
    mid = np.linspace(0.05, 0.95, 19)
    fd = (smooth_step(mid + h) - smooth_step(mid - h)) / (2 * h)
    np.testing.assert_allclose(smooth_step_prime(mid), fd, rtol=1e-6, atol=1e-9)


def test_bump_derivatives():
    b = Bump(0.2, 0.7)
    x = np.linspace(-0.45, 0.85, 27)
    h = 1e-5
    np.testing.assert_allclose(b.d1(x), (b(x + h) - b(x - h)) / (2 * h), rtol=1e-6, atol=1e-9)
    np.testing.assert_allclose(b.d2(x), (b.d1(x + h) - b.d1(x - h)) / (2 * h), rtol=1e-6,
                               atol=1e-8)
    assert b(0.2) == 1.0 and b(0.9) == 0.0 and b(-0.6) == 0.0


@pytest.mark.parametrize("mu", [fractional(0.6), fractional(1.5), tempered(1.1, 2.0),
                                compound_poisson([(0.01, 3.0), (0.2, 1.0)])],
                         ids=["frac0.6", "frac1.5", "tempered", "atoms"])
def test_inner_operator_on_cosines(mu):
    # L^{<r}[cos(xi .)] = -cos(xi x) * m_r(xi), m_r the symbol of the part below r
    r, xi = 0.05, 7.0
    x = np.linspace(-1, 1, 9)
    inner, _ = truncate(mu, r)
    expect = -np.cos(xi * x) * symbol(inner, xi)
    got = inner_operator(mu, r, lambda y: np.cos(xi * y), x)
    # second differences lose digits at the smallest Gauss nodes: about 1e-9 relative
    np.testing.assert_allclose(got, expect, rtol=1e-8, atol=1e-8 * symbol(inner, xi))


def test_family_and_k_grid():
    g = Grid.around(-1.0, 1.0, 100)
    fam = Family.standard(g, 1.0)
    assert len(fam) == 12
    assert sorted({tf.tau for tf in fam.members}) == [0.25, 0.5, 0.75]
    centers = sorted({tf.beta.center for tf in fam.members})
    assert centers == pytest.approx([-1.0, -0.4, 0.3, 1.0])
    for tf in fam.members:
        assert tf.theta(0.0) == 1.0 and tf.theta(tf.tau) == 0.0 and tf.c2_norm() > 0
    ks = standard_k_grid(0.0, 1.0)
    assert ks.size == 19 and ks[0] < 0 and ks[-1] > 1


# ---------------------------------------------------------- boundary layers

def test_boundary_layer_invariants():
    g = Grid.around(-1.0, 1.0, 200)
    layers = BoundaryLayer.ladder(g)
    d = layers.deltas
    assert d[0] == pytest.approx(0.4) and d[-1] == pytest.approx(4 * g.dx)
    assert all(b < a for a, b in zip(d[:-1], d[1:]))
    for delta in d:
        z = layers.inner(delta, g.x)
        assert np.all((0 <= z) & (z <= 1)) and np.all(z[g.exterior] == 0)
        tv, _ = integrate.quad(lambda y: abs(float(layers.inner_prime(delta, y))), -1, 1,
                               points=[-1 + delta, 1 - delta], limit=200)
        assert tv <= 2 + 1e-6
        closed = np.linspace(-1, 1, 101)
        assert np.all(layers.outer(delta, closed) == 1.0)
        assert layers.outer(delta, 1 + 2 * delta) == 0.0
    with pytest.raises(ValueError):
        BoundaryLayer.ladder(Grid.around(-1.0, 1.0, 8))


# ------------------------------------------------------------ entropy check

def test_entropy_trivial_constant_state():
    _, f = solved("constant")
    rep = entropy_report(f, k_grid=[0.7])
    # the constant state carries roundoff from f and L at the 1e-17 level
    assert rep.records and all(abs(r.lhs) <= 1e-14 and r.rhs >= 0 for r in rep.records)


def test_entropy_k_beyond_range_vanishes():
    _, f = solved("burgers-fractional")
    lo, hi = f.info["data_range"]
    rep = entropy_report(f, k_grid=[hi + 0.5])
    plus = [r for r in rep.records if r.name.startswith("+")]
    assert plus and all(r.lhs == 0.0 and r.rhs >= 0.0 for r in plus)


def test_entropy_burgers_riemann_passes():
    _, f = solved("burgers-riemann", N=200)
    assert entropy_report(f, C_res=8.0).passed
    rep = entropy_report(f, C_res=residual_constant("burgers-riemann"))
    assert rep.passed and rep.notes["pairs"] > 0
    assert required_residual_constant(rep) <= residual_constant("burgers-riemann")


def test_entropy_skips_inadmissible_pairs():
    _, f = solved("stefan")
    rep = entropy_report(f)
    assert rep.notes["skipped"] > 0 and rep.notes["pairs"] > 0
    assert rep.notes["pairs"] + rep.notes["skipped"] == 2 * 12 * 19


def test_entropy_report_reproducible():
    _, f = solved("burgers-fractional")
    _, g = solved("burgers-fractional")
    a = [r.as_dict() for r in entropy_report(f).records]
    b = [r.as_dict() for r in entropy_report(g).records]
    assert a == b


# ------------------------------------------------------------- energy check

def test_energy_trivial_cases():
    _, f = solved("constant")
    rec = check_energy(f).records[0]
    assert abs(rec.lhs) <= 1e-14 and rec.detail["initial_H"] == 0.0 and rec.passed
    _, f = solved("burgers-riemann")
    rec = check_energy(f).records[0]
    assert rec.lhs == 0.0 and rec.detail["rhs_raw"] == 0.0 and rec.passed


def test_energy_fractional_heat_initial_energy():
    # H(u0, 0) = u0^2 / 2 with u0 = cos^2 on |x| < 1/2: integral 3 w / 8
    for N in (100, 200):
        _, f = solved("fractional-heat", N=N)
        rec = check_energy(f).records[0]
        assert rec.detail["initial_H"] == pytest.approx(3 * 0.5 / 8, rel=1e-6)
        assert rec.detail["transport"] == 0.0 and rec.detail["coupling"] == 0.0
        assert 0 < rec.lhs <= rec.detail["rhs_raw"]


# ------------------------------------------------- boundary integrability

def test_boundary_integrability_trivial_and_stefan():
    _, f = solved("burgers-riemann")
    assert check_boundary_integrability(f).records[0].lhs == 0.0
    _, f = solved("constant")
    assert check_boundary_integrability(f).records[0].lhs <= 1e-14
    _, f = solved("stefan", N=200)
    rep = check_boundary_integrability(f)
    rec = rep.records[0]
    assert rep.passed and rec.lhs > 0
    assert rec.rhs == pytest.approx(rec.detail["lipschitz_part"] + rec.detail["data_part"]
                                    + rec.detail["sup_c_part"])


# ---------------------------------------------------- boundary condition

def bc_report(name, N=100, **kw):
    p, f = solved(name, N=N)
    layers = BoundaryLayer.ladder(p.grid)
    fam = Family.standard(p.grid, p.T)
    return check_boundary_condition(f, p, layers, standard_k_grid(*f.info["data_range"]), fam,
                                    **kw)


def test_boundary_condition_trivial():
    rep = bc_report("constant")
    assert all(abs(v) <= 1e-14 for r in rep.records for v in r.detail["ladder"])


def test_boundary_condition_inflow_passes_everywhere():
    rep = bc_report("inflow-transport", N=200)
    assert rep.passed
    for r in rep.records:
        assert max(r.detail["ladder"]) <= r.tol


def test_boundary_condition_ladder_checks():
    p, f = solved("inflow-transport")
    fam = Family.standard(p.grid, p.T)
    with pytest.raises(ValueError):
        check_boundary_condition(f, p, BoundaryLayer(-1, 1, [0.1, 0.2]), [0.5], fam)
    with pytest.raises(ValueError):
        check_boundary_condition(f, p, BoundaryLayer(-1, 1, [0.4, p.grid.dx]), [0.5], fam)


def test_pair_gate():
    boundary_pair_gate(Nonlinearity(burgers(), identity()), -2, 2)

    class Broken(Nonlinearity):
        def boundary_pairs_two_term(self, u, uc, k):
            F, S = super().boundary_pairs_two_term(u, uc, k)
            return F + 1e-3, S

    with pytest.raises(PairIdentityFailure):
        boundary_pair_gate(Broken(burgers(), identity()), -2, 2)


# ------------------------------------------------------------- mean lemma

def test_mean_lemma_examples():
    knots, vals = np.array([-1.0, 0.0, 1.0]), np.array([1.0, 0.0, 1.0])
    assert mean_lemma_trial([1.0, -1.0], [0.75, 0.25], knots, vals, 1.0, 1.0) == (0.25, 1.0)
    assert mean_lemma_trial([0.0], [1.0], knots, vals, 1.0, 1.0)[0] == 0.0


def test_v_shapes_are_v_shaped(rng):
    for _ in range(200):
        R, L = rng.uniform(0.1, 5, 2)
        knots, vals = random_v_shape(rng, R, L)
        slopes = np.diff(vals) / np.diff(knots)
        i0 = int(np.flatnonzero(knots == 0.0)[0])
        assert vals[i0] == 0.0 and np.all(vals >= 0)
        assert np.all(slopes[:i0] <= 0) and np.all(slopes[i0:] >= 0)
        assert np.max(np.abs(slopes)) == pytest.approx(L)


def test_mean_lemma_sweep_reproducible():
    a = check_mean_lemma(2000, seed=3)
    b = check_mean_lemma(2000, seed=3)
    assert a.passed and a.notes["violations"] == 0
    assert [r.as_dict() for r in a.records] == [r.as_dict() for r in b.records]
    assert math.isfinite(a.worst.slack)
