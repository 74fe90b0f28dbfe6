import csv

import numpy as np
import pytest

from nonlocal_bvp.grid import Grid, GridFunction


def test_around_places_domain_on_cell_boundaries():
    g = Grid.around(-1.0, 1.0, 64, 0.5)
    assert (g.x_min, g.x_max, g.dx) == (-2.0, 2.0, 1 / 16)
    assert g.interior.sum() == 32
    assert np.all(g.x[g.interior] > -1) and np.all(g.x[g.interior] < 1)
    assert g.interior_slice == slice(16, 48)
    with pytest.raises(ValueError):
        Grid.around(-1.0, 1.0, 62, 0.5)


def test_snapping_and_collar():
    g = Grid(0.0, 1.0, 10, 0.22, 0.81)
    assert g.a == pytest.approx(0.2) and g.b == pytest.approx(0.8)
    with pytest.raises(ValueError):
        Grid(0.0, 1.0, 10, 0.22, 0.81, collar=0.3)
    with pytest.raises(ValueError):
        Grid(0.0, 1.0, 10, 0.0, 0.5)


def test_refined_keeps_domain():
    g = Grid.around(-1.0, 1.0, 48).refined(2)
    assert g.N == 96 and g.a == -1.0 and g.b == 1.0


def test_grid_function_lookup_and_budget(tmp_path):
    g = Grid.around(-1.0, 1.0, 16)
    f = GridFunction.sample(g, lambda t, x: np.sin(x) + t, t=0.5)
    assert f(g.x[3]) == pytest.approx(np.sin(g.x[3]) + 0.5)
    assert f(g.x[3] + 0.4 * g.dx) == f(g.x[3])
    assert f(7.0) == pytest.approx(np.sin(7.0) + 0.5)
    with pytest.raises(ValueError):
        f.values[0] = 1.0
    with pytest.raises(ValueError):
        GridFunction(g, np.full(g.N, 2.0), budget=1.0)
    with pytest.raises(ValueError):
        GridFunction(g, np.zeros(g.N + 1))
    sq = f.map(np.square)
    assert sq(9.0) == pytest.approx((np.sin(9.0) + 0.5) ** 2)
    f.to_csv(tmp_path / "f.csv")
    rows = list(csv.reader(open(tmp_path / "f.csv")))
    assert rows[0] == ["x", "value"] and len(rows) == g.N + 1
    assert float(rows[5][1]) == f.values[4]
