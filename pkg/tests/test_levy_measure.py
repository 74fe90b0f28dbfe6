import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from nonlocal_bvp.levy_measure import (IncomparableMeasures, InvalidMeasure, compactness_scan,
                                       compactness_verdict, compound_poisson, custom, dyadic,
                                       fractional, fractional_constant, levy_integrand_mass,
                                       measure_distance, small_moment, symbol, symbol_many,
                                       tail_mass, tempered, total_mass, truncate)

MEASURES = {
    "frac0.5": lambda: fractional(0.5),
    "frac1": lambda: fractional(1.0),
    "frac1.5": lambda: fractional(1.5),
    "tempered": lambda: tempered(0.8, 2.0),
    "dyadic": lambda: dyadic(),
    "poisson": lambda: compound_poisson([(0.3, 0.7), (1.7, 0.2)]),
}


# ---------------------------------------------------------------- oracles

def brute_integrand_mass(alpha, zmax=1e3, nodes=1_000_000):
    """Composite midpoint in log z on [1e-12, zmax], plus the exact power tail beyond."""
    C = fractional_constant(alpha)
    s = np.linspace(math.log(1e-12), math.log(zmax), nodes + 1)
    mid = 0.5 * (s[1:] + s[:-1])
    z = np.exp(mid)
    body = np.sum(np.minimum(z * z, 1.0) * C * z ** (-1.0 - alpha) * z) * (s[1] - s[0])
    below = C * 1e-12 ** (2 - alpha) / (2 - alpha)
    beyond = C * zmax ** (-alpha) / alpha
    return 2.0 * (body + below + beyond)


def test_fractional_integrand_mass_matches_brute_force():
    oracle = brute_integrand_mass(0.5)
    assert levy_integrand_mass(fractional(0.5)) == pytest.approx(oracle, rel=1e-6)


def test_fractional_closed_forms():
    for alpha in (0.5, 1.0, 1.5):
        C = fractional_constant(alpha)
        mu = fractional(alpha)
        for r in (1e-3, 0.1, 1.0, 7.0):
            assert small_moment(mu, r) == pytest.approx(2 * C * r ** (2 - alpha) / (2 - alpha),
                                                        rel=1e-8)
            assert tail_mass(mu, r) == pytest.approx(2 * C * r ** (-alpha) / alpha, rel=1e-8)
    assert small_moment(fractional(1.0), 0.3) == pytest.approx(2 * fractional_constant(1) * 0.3,
                                                               rel=1e-8)


def test_fractional_constant_gives_unit_symbol():
    # C_{1,1} = 1/pi: the Cauchy jump density
    assert fractional_constant(1.0) == pytest.approx(1 / math.pi, rel=1e-14)
    for alpha in (0.3, 1.0, 1.7):
        mu = fractional(alpha)
        for xi in (0.5, 3.0, 40.0):
            assert symbol(mu, xi) == pytest.approx(abs(xi) ** alpha, rel=1e-8)


def test_tempered_against_mpmath():
    alpha, lam = 0.8, 2.0
    mu = tempered(alpha, lam)
    C = fractional_constant(alpha)
    mp.mp.dps = 30
    rho = lambda z: C * mp.e ** (-lam * z) * z ** (-1 - alpha)
    tail = 2 * mp.quad(rho, [0.25, 1, 10, mp.inf])
    assert tail_mass(mu, 0.25) == pytest.approx(float(tail), rel=1e-8)
    mom = 2 * mp.quad(lambda z: z * z * rho(z), [0, 0.1, 0.5])
    assert small_moment(mu, 0.5) == pytest.approx(float(mom), rel=1e-8)
    m = 2 * mp.quad(lambda z: (1 - mp.cos(3 * z)) * rho(z), [0, 0.5, 2, 10, mp.inf])
    assert symbol(mu, 3.0) == pytest.approx(float(m), rel=1e-7)


def test_dyadic_values():
    mu = dyadic()
    assert levy_integrand_mass(mu) == pytest.approx(2.0, rel=1e-12)
    assert tail_mass(mu, 1.0) == pytest.approx(1.0, rel=1e-15)
    for j in range(1, 10):
        assert small_moment(mu, 1.5 * 2.0 ** -j) == pytest.approx(2.0 ** (1 - j), rel=1e-12)


def test_atoms_outside_unit_ball_count_mass():
    mu = compound_poisson([(2.0, 0.5)])
    assert levy_integrand_mass(mu) == pytest.approx(1.0, rel=1e-15)
    assert total_mass(mu) == pytest.approx(1.0)
    assert small_moment(compound_poisson([(1.0, 0.4)]), 0.5) == 0.0
    assert tail_mass(compound_poisson([(0.1, 0.3), (2.0, 0.2)]), 1e-9) == pytest.approx(1.0)


def test_truncated_dyadic_symbol_vanishes_at_resonance():
    for j in (3, 6, 10):
        mu = dyadic(levels=j)
        xi = math.pi * 2.0 ** j
        assert abs(symbol(mu, xi)) <= 1e-9
        assert abs(symbol_many(mu, [xi])[0]) <= 1e-9


def test_symbol_homogeneity():
    for alpha in (0.5, 1.0, 1.5):
        mu = fractional(alpha)
        for xi in (0.7, 5.0, 123.0):
            assert symbol(mu, 2 * xi) / symbol(mu, xi) == pytest.approx(2 ** alpha, rel=1e-6)
    assert symbol(fractional(1.0), 0.0) == 0.0


def test_compactness_scan():
    scan = compactness_scan(fractional(1.0), [1, 10, 100])
    mins = [m for _, m in scan]
    assert mins == pytest.approx([1, 10, 100], rel=1e-2)
    assert compactness_verdict(scan) == "for"

    j = 6
    scan = compactness_scan(dyadic(levels=j), [50, 100, 200, 400])
    assert any(m <= 1e-9 for R, m in scan if R <= math.pi * 2 ** j)
    assert compactness_verdict(scan) == "against"

    scan = compactness_scan(compound_poisson([(1.0, 0.5)]), [10, 100, 1000])
    assert max(m for _, m in scan) <= 1e-9
    assert compactness_verdict(scan) == "against"


def test_truncate():
    mu = dyadic()
    inner, outer = truncate(mu, 0.75)
    assert outer.atoms == ((1.0, 0.5),)
    assert levy_integrand_mass(inner) + levy_integrand_mass(outer) == \
        pytest.approx(levy_integrand_mass(mu), rel=1e-12)
    frac = fractional(1.2)
    _, out = truncate(frac, 0.3)
    assert tail_mass(out, 0.3) == pytest.approx(tail_mass(frac, 0.3), rel=1e-14)
    inner, outer = truncate(compound_poisson([(0.5, 1.0)]), 2e3)
    assert outer.atoms == () and outer.pieces == () and inner.atoms == ((0.5, 1.0),)


def test_measure_distance_examples():
    mu = fractional(0.7)
    assert measure_distance(mu, mu) == 0.0
    for n in (2, 10, 100):
        _, outer = truncate(mu, 1.0 / n)
        assert measure_distance(outer, mu) == pytest.approx(small_moment(mu, 1.0 / n),
                                                            rel=1e-12)
    other = fractional(1.3)
    for n in (1, 4, 50):
        mixed = mu + other.scaled(1.0 / n)
        assert measure_distance(mu, mixed) == pytest.approx(levy_integrand_mass(other) / n,
                                                            rel=1e-10)


def test_incomparable_tables():
    a = custom(table=([0.1, 1.0], [1.0, 1.0]))
    b = custom(table=([0.2, 1.0], [1.0, 1.0]))
    with pytest.raises(IncomparableMeasures):
        measure_distance(a, b)


def test_invalid_measures():
    with pytest.raises(InvalidMeasure):
        fractional(2.5)
    with pytest.raises(InvalidMeasure):
        compound_poisson([(0.5, -1.0)])
    with pytest.raises(InvalidMeasure):
        custom(func=lambda z: z ** -3.5)


def test_custom_table_matches_closed_form():
    zt = np.linspace(0.5, 2.0, 4)
    mu = custom(table=(zt, 3.0 - zt))
    # two-sided int of (3 - z) over [0.5, 2] is 2 * (4.5 - 1.875)
    assert tail_mass(mu, 0.1) == pytest.approx(2 * (3 * 1.5 - (4 - 0.25) / 2), rel=1e-13)


# ------------------------------------------------------------- invariants

measure_names = st.sampled_from(sorted(MEASURES))
xis = st.floats(min_value=-200, max_value=200, allow_nan=False)
radii = st.floats(min_value=1e-3, max_value=5.0)


@given(measure_names, xis)
def test_symbol_even_and_nonnegative(name, xi):
    mu = MEASURES[name]()
    assert symbol(mu, xi) == symbol(mu, -xi)
    assert symbol(mu, xi) >= 0.0


@given(measure_names, xis, radii)
def test_splitting_additivity(name, xi, r):
    mu = MEASURES[name]()
    inner, outer = truncate(mu, r)
    whole = symbol(mu, xi)
    assert abs(symbol(inner, xi) + symbol(outer, xi) - whole) <= 1e-10 * max(whole, 1e-300) \
        + 1e-14


@given(measure_names, xis, radii)
def test_symbol_bound(name, xi, r):
    mu = MEASURES[name]()
    bound = 2 * tail_mass(mu, r) + 0.5 * xi * xi * small_moment(mu, r)
    assert symbol(mu, xi) <= bound * (1 + 1e-10)


@given(st.lists(st.tuples(st.floats(0.05, 3.0), st.floats(0.01, 2.0)), min_size=1, max_size=4),
       st.lists(st.tuples(st.floats(0.05, 3.0), st.floats(0.01, 2.0)), min_size=1, max_size=4),
       st.lists(st.tuples(st.floats(0.05, 3.0), st.floats(0.01, 2.0)), min_size=1, max_size=4))
def test_distance_is_pseudometric_on_atoms(a, b, c):
    A, B, Cm = compound_poisson(a), compound_poisson(b), compound_poisson(c)
    dab, dba = measure_distance(A, B), measure_distance(B, A)
    assert dab == pytest.approx(dba, abs=1e-12)
    assert dab <= measure_distance(A, Cm) + measure_distance(Cm, B) + 1e-10


@given(st.sampled_from([0.4, 0.9, 1.6]), st.sampled_from([0.5, 1.1, 1.9]),
       st.sampled_from([0.3, 1.0]), st.sampled_from([0.6, 1.4]))
def test_distance_triangle_on_densities(a1, a2, a3, w):
    A, B, Cm = fractional(a1), fractional(a2).scaled(w), fractional(a3)
    assert measure_distance(A, B) <= measure_distance(A, Cm) + measure_distance(Cm, B) + 1e-10


def test_distance_between_power_densities_against_mpmath():
    a, b = fractional(1.0), fractional(0.5).scaled(1.4)
    ca, cb = fractional_constant(1.0), 1.4 * fractional_constant(0.5)
    mp.mp.dps = 30
    diff = lambda z: abs(ca * z ** -2 - cb * z ** -1.5)  # noqa: E731
    cross = (ca / cb) ** 2
    body = mp.quad(lambda z: z * z * diff(z), [0, min(cross, 1), 1])
    tail = mp.quad(diff, [1, cross, mp.inf]) if cross > 1 else mp.quad(diff, [1, mp.inf])
    assert measure_distance(a, b) == pytest.approx(float(2 * (body + tail)), rel=1e-9)
