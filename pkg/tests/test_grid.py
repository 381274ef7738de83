import numpy as np
import pytest

from heisenpde.fields import parse_polynomial
from heisenpde.grid import Grid3, GridFunction
from heisenpde.rng import SplitMix64


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid3((0, 0, 0), (2, 3, 3), (0.1, 0.1, 0.1))
    with pytest.raises(ValueError):
        Grid3((0, 0, 0), (3, 3, 3), (0.1, -0.1, 0.1))


def test_grid_box_and_upper():
    g = Grid3.box((-1, -1, -1), (1, 1, 1), (17, 17, 17))
    assert g.spacings == (0.125, 0.125, 0.125)
    assert g.upper == (1.0, 1.0, 1.0)
    assert g.n_nodes == 17**3


def test_index_coordinate_roundtrip():
    g = Grid3.box((-1.0, 0.5, -2.0), (1.0, 2.5, 0.0), (9, 11, 5))
    for idx in [(0, 0, 0), (8, 10, 4), (3, 7, 2)]:
        assert g.index(g.coordinate(idx)) == idx
    # every node, exactly
    for i1 in range(9):
        for i2 in range(11):
            for i3 in range(5):
                assert g.index(g.coordinate((i1, i2, i3))) == (i1, i2, i3)


def test_points_order_is_x3_fastest():
    g = Grid3.box((0, 0, 0), (1, 1, 1), (3, 3, 3))
    pts = g.points()
    assert np.array_equal(pts[0], [0, 0, 0])
    assert np.array_equal(pts[1], [0, 0, 0.5])
    assert np.array_equal(pts[3], [0, 0.5, 0])
    assert np.array_equal(pts[9], [0.5, 0, 0])


def test_coarsen_refine():
    g = Grid3.box((-1, -1, -1), (1, 1, 1), (17, 17, 17))
    c = g.coarsen()
    assert c.counts == (9, 9, 9)
    assert c.spacings == (0.25, 0.25, 0.25)
    assert c.refine() == g
    assert not Grid3.box((0, 0, 0), (1, 1, 1), (8, 9, 9)).can_coarsen()
    with pytest.raises(ValueError):
        Grid3.box((0, 0, 0), (1, 1, 1), (8, 9, 9)).coarsen()


def test_margin_box():
    g = Grid3.box((-1, -1, -1), (1, 1, 1), (9, 9, 9))
    lo, hi = g.margin_box(0.1)
    assert np.allclose(lo, [-0.8, -0.8, -0.8])
    assert np.allclose(hi, [0.8, 0.8, 0.8])


def test_gridfunction_trilinear_exact_on_trilinear_data():
    # trilinear interpolation reproduces fields multilinear in each axis
    g = Grid3.box((-1, -1, -1), (1, 1, 1), (9, 9, 9))
    u = parse_polynomial("2 + x1 - 3 x2 x3 + 0.5 x1 x2 x3")
    gf = GridFunction.from_field(g, u)
    rng = SplitMix64(80, "interp")
    pts = rng.uniform(60, -1, 1).reshape(20, 3)
    vals = gf.value_batch(pts)
    exact = u.value_batch(pts)
    assert np.allclose(vals, exact, atol=1e-13)


def test_gridfunction_interp_second_order():
    g1 = Grid3.box((-1, -1, -1), (1, 1, 1), (9, 9, 9))
    g2 = g1.refine()
    u = parse_polynomial("x1^2 x3 + x2^2")
    rng = SplitMix64(81, "order")
    pts = rng.uniform(45, -0.9, 0.9).reshape(15, 3)
    exact = u.value_batch(pts)
    e1 = np.abs(GridFunction.from_field(g1, u).value_batch(pts) - exact).max()
    e2 = np.abs(GridFunction.from_field(g2, u).value_batch(pts) - exact).max()
    assert np.log2(e1 / e2) > 1.5


def test_gridfunction_shape_validation():
    g = Grid3.box((0, 0, 0), (1, 1, 1), (3, 3, 3))
    GridFunction(g, np.zeros(27))
    with pytest.raises(ValueError):
        GridFunction(g, np.zeros((3, 3, 4)))


def test_csv_roundtrip(tmp_path):
    g = Grid3.box((-1, -0.5, 0), (1, 0.5, 2), (5, 7, 9))
    u = parse_polynomial("x1 x2 - 0.125 x3^2 + 1")
    gf = GridFunction.from_field(g, u)
    path = tmp_path / "u.csv"
    gf.to_csv(path)
    back = GridFunction.from_csv(path)
    assert back.grid.counts == g.counts
    assert np.allclose(back.grid.spacings, g.spacings, rtol=1e-12)
    assert np.array_equal(back.values, gf.values)


def test_csv_rejects_malformed(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x1,x2,x3,u\n0,0,0,1\n1,0,0,2\n")
    with pytest.raises(ValueError):
        GridFunction.from_csv(path)


def test_csv_is_deterministic(tmp_path):
    g = Grid3.box((0, 0, 0), (1, 1, 1), (4, 4, 4))
    u = parse_polynomial("0.1 x1 + 0.2 x2^2")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    GridFunction.from_field(g, u).to_csv(a)
    GridFunction.from_field(g, u).to_csv(b)
    assert a.read_bytes() == b.read_bytes()
