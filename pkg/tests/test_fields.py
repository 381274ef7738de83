import numpy as np
import pytest
from conftest import random_points, random_polynomial

from heisenpde.fields import (
    NumericField,
    PolynomialField,
    field_from_config,
    parse_polynomial,
    smooth_abs_field,
)
from heisenpde.group import Point
from heisenpde.rng import SplitMix64


def test_parse_basic_forms():
    p = parse_polynomial("2 * x1^2 x2 + 3.5*x3 - x1")
    assert p.terms == parse_polynomial("-x1 + 2x1^2x2 + 3.5 x3").terms
    assert p.value(Point(1.0, 1.0, 0.0)) == 2.0 - 1.0
    assert p.value(Point(0.0, 0.0, 2.0)) == 7.0


def test_parse_scientific_and_constants():
    p = parse_polynomial("1e-2 * x1 + 4")
    assert p.value(Point(100.0, 0.0, 0.0)) == 5.0
    assert parse_polynomial("1").value(Point(3, 4, 5)) == 1.0


def test_parse_rejects_garbage():
    for bad in ("", "x4", "2 **", "x1^", "+", "x1^x2", "* x1", "x1 *"):
        with pytest.raises(ValueError):
            parse_polynomial(bad)


def test_polynomial_partials_are_exact():
    u = parse_polynomial("x1^2 x3 - 2 x2 x3^2")
    p = Point(1.5, -0.5, 2.0)
    assert u.partial(p, 0) == 2 * 1.5 * 2.0
    assert u.partial(p, 2) == 1.5**2 - 2 * 2 * (-0.5) * 2.0
    assert u.second_partial(p, 0, 2) == 2 * 1.5
    assert u.second_partial(p, 2, 2) == -4 * (-0.5)


def test_value_batch_matches_scalar():
    g = SplitMix64(31, "vb")
    u = random_polynomial(g)
    pts = random_points(g, 50)
    batch = u.value_batch(pts)
    for k, row in enumerate(pts):
        assert np.isclose(batch[k], u.value(Point(*row)), rtol=1e-13, atol=1e-13)


def test_apply_x_on_coordinates():
    # X x1 = 1, X x3 = 2 x2; Y x2 = 1, Y x3 = -2 x1
    x1 = PolynomialField.coordinate(0)
    x3 = PolynomialField.coordinate(2)
    assert x1.apply_x() == PolynomialField.constant(1)
    assert x3.apply_x() == PolynomialField({(0, 1, 0): 2})
    assert x3.apply_y() == PolynomialField({(1, 0, 0): -2})


def test_dilate_composition_is_exact():
    u = parse_polynomial("x1 x2 + x3^2")
    v = u.dilate(3.0)
    # x1*x2 scales by 9, x3^2 by 81
    assert v == PolynomialField({(1, 1, 0): 9, (0, 0, 2): 81})


def test_numeric_field_first_and_second_partials():
    fn = lambda pts: np.sin(pts[:, 0]) * pts[:, 2] + pts[:, 1] ** 3
    u = NumericField(fn)
    p = Point(0.3, 0.7, -1.2)
    assert np.isclose(u.partial(p, 0), np.cos(0.3) * -1.2, atol=1e-8)
    assert np.isclose(u.partial(p, 1), 3 * 0.7**2, atol=1e-8)
    assert np.isclose(u.second_partial(p, 0, 2), np.cos(0.3), atol=1e-6)
    assert np.isclose(u.second_partial(p, 1, 1), 6 * 0.7, atol=1e-5)


def test_numeric_field_fd_order_two():
    fn = lambda pts: np.exp(pts[:, 0] + 0.5 * pts[:, 1])
    p = Point(0.1, 0.2, 0.0)
    exact = np.exp(0.1 + 0.5 * 0.2)
    errs = []
    for h in (1e-2, 5e-3, 2.5e-3):
        u = NumericField(fn, h_fd=h)
        errs.append(abs(u.partial(p, 0) - exact))
    order = np.log(errs[0] / errs[2]) / np.log(4.0)
    assert order > 1.9


def test_numeric_field_rejects_nonfinite_and_bad_step():
    with pytest.raises(ValueError):
        NumericField(lambda pts: np.full(pts.shape[0], np.nan)).value(Point(0, 0, 0))
    with pytest.raises(ValueError):
        NumericField(lambda pts: pts[:, 0], h_fd=0.0)


def test_smooth_abs_field_shape():
    f = smooth_abs_field(eps=0.1)
    assert f.value(Point(0, 0, 0)) == 0.0
    # gradient norm strictly below 1: Lipschitz-1
    g = SplitMix64(32, "sa")
    for row in random_points(g, 20, -3, 3):
        p = Point(*row)
        grad = np.array([f.partial(p, i) for i in range(3)])
        assert np.linalg.norm(grad) < 1.0 + 1e-8


def test_field_from_config():
    f = field_from_config({"poly": "x1 + 1"})
    assert f.value(Point(2, 0, 0)) == 3.0
    g = field_from_config({"builtin": "smooth_abs", "eps": 0.2, "scale": 2.0})
    assert g.value(Point(0, 0, 0)) == 0.0
    with pytest.raises(ValueError):
        field_from_config({"poly": "x1", "extra": 1})
    with pytest.raises(ValueError):
        field_from_config({"builtin": "nope"})
    with pytest.raises(ValueError):
        field_from_config({"other": 1})
