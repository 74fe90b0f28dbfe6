import numpy as np
import pytest

from nonlocal_bvp.config import RunConfig
from nonlocal_bvp.hyperbolic import solve_with_source
from nonlocal_bvp.levy_measure import compound_poisson, fractional, measure_distance, truncate
from nonlocal_bvp.solver import (CertificateFailure, NotFiniteMeasure, certificate, l1_Q, l2_Q,
                                 run_truncated_sequence, run_vanishing_viscosity, solve_direct,
                                 solve_fixed_point)
from nonlocal_bvp.scenarios import PRESETS


def problem(name, N=100, **overrides):
    return RunConfig.from_preset(name, **overrides).problem(N=N)


def test_zero_diffusion_matches_hyperbolic_core_bitwise():
    p = problem("burgers-riemann")
    a = solve_direct(p)
    b = solve_with_source(p.grid, p.nonlin.f, p.initial_box(), p.uc, None, p.T, times=a.times,
                          L_f=a.info["L_f"])
    assert np.array_equal(a.U, b.U)


def test_heat_mass_nonincreasing():
    p = problem("fractional-heat")
    f = solve_direct(p)
    mass = np.sum(f.interior(), axis=1) * p.grid.dx
    assert np.all(np.diff(mass) <= 1e-15)
    assert mass[-1] < mass[0]


def test_constants_exact():
    f = solve_direct(problem("constant"))
    assert np.max(np.abs(f.U - 0.7)) <= 1e-12


def test_certificate_and_dt():
    p = problem("stefan")
    f = solve_direct(p)
    assert f.info["certificate"] <= 0.9 * (1 + 1e-12)
    with pytest.raises(CertificateFailure):
        solve_direct(p, times=np.array([0.0, p.T]))
    assert certificate(p, 2 * float(np.max(f.dts))) > 0.9


def test_exterior_condition_on_every_slice():
    p = problem("stefan")
    f = solve_direct(p)
    g = p.grid
    for t, u in zip(f.times, f.U):
        np.testing.assert_array_equal(u[g.exterior], p.uc(t, g.x[g.exterior]))


ATOMS = {"measure": {"kind": "compound_poisson", "atoms": "0.1:0.5, 0.35:0.25"}}


def test_fixed_point_factorial_bound_and_agreement():
    p = problem("burgers-fractional", N=200, **ATOMS)
    res = solve_fixed_point(p)
    assert res.converged
    for k in range(1, min(8, len(res.gaps)) + 1):
        assert res.gaps[k - 1] <= 1.1 * res.factorial_bound(k)
    direct = solve_direct(p, res.field.times)
    assert l1_Q(direct.U, res.field.U, direct) <= 1e-8


def test_fixed_point_without_diffusion_settles_after_one_step():
    p = problem("burgers-riemann")
    res = solve_fixed_point(p.with_measure(compound_poisson([(0.3, 1.0)])))
    assert len(res.gaps) == 2 and res.gaps[0] > 0 and res.gaps[1] == 0.0


def test_fixed_point_rejects_infinite_measure():
    with pytest.raises(NotFiniteMeasure):
        solve_fixed_point(problem("fractional-heat"))


def test_truncated_sequence():
    p = problem("burgers-fractional", N=100)
    ladder = [2, 4, 8, 16, 32]
    members = run_truncated_sequence(p, ladder)
    d = [m.distance for m in members]
    assert all(b < a for a, b in zip(d[:-1], d[1:]))
    for m, n in zip(members, ladder):
        _, outer = truncate(p.mu, 1.0 / n)
        assert m.distance == measure_distance(outer, p.mu)
    assert members[-1].absorbed and not members[-2].absorbed
    np.testing.assert_array_equal(members[-1].field.U, solve_direct(p, members[-1].field.times).U)
    b = [m.field.b_of_u() for m in members]
    gaps = [l2_Q(x, y, members[0].field) for x, y in zip(b[:-1], b[1:])]
    assert gaps[-1] < gaps[0]
    with pytest.raises(ValueError):
        run_truncated_sequence(p, [4, 2])


def test_vanishing_viscosity_trivial_and_rate():
    zero = problem("fractional-heat", data={"u0": "constant", "u0_value": "0"})
    res = run_vanishing_viscosity(zero, 1.0, [1, 10, 100])
    assert all(np.all(m.U == 0) for m in res.members) and res.distances == [0.0, 0.0, 0.0]

    p = problem("inflow-transport", N=100, nonlinearity={"diffusion": "identity"})
    res = run_vanishing_viscosity(p, 1.0, [1, 10, 100, 1000])
    assert all(b < a for a, b in zip(res.distances[:-1], res.distances[1:]))
    slope = np.polyfit(np.log(res.ns), np.log(res.distances), 1)[0]
    assert -slope >= 0.3


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_max_principle_and_contraction(name):
    p = problem(name)
    f = solve_direct(p)
    lo, hi = f.info["data_range"]
    assert f.U.min() >= lo - 1e-12 and f.U.max() <= hi + 1e-12
    g = p.grid
    shift = lambda x: p.u0(x) + 0.2 * np.exp(-((x - 0.1) / 0.3) ** 2)  # noqa: E731
    q = p.__class__(**{**p.__dict__, "u0": shift})
    h = solve_direct(q)
    f = solve_direct(p, h.times)
    sl = g.interior_slice
    gap = np.sum(np.abs(f.U[:, sl] - h.U[:, sl]), axis=1) * g.dx
    assert np.all(gap <= gap[0] + 1e-10)


def test_fractional_measure_is_not_finite():
    assert not fractional(1.0).is_finite
