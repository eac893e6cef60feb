from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hwopsip.quadrature import (
    SUPPORTED_TRIANGLE_DEGREES,
    integrate,
    segment_rule,
    triangle_rule,
)


def monomial_integral(a, b):
    return factorial(a) * factorial(b) / factorial(a + b + 2)


@pytest.mark.parametrize("degree", SUPPORTED_TRIANGLE_DEGREES)
def test_triangle_rule_exactness(degree):
    rule = triangle_rule(degree)
    x, y = rule.points.T
    for a in range(degree + 1):
        for b in range(degree + 1 - a):
            exact = monomial_integral(a, b)
            assert np.dot(rule.weights, x**a * y**b) == pytest.approx(exact, rel=1e-13)


@pytest.mark.parametrize("degree", SUPPORTED_TRIANGLE_DEGREES)
def test_weights_sum_to_reference_area(degree):
    assert triangle_rule(degree).weights.sum() == pytest.approx(0.5, rel=1e-13)


def test_degree_one_is_centroid():
    rule = triangle_rule(1)
    assert len(rule) == 1
    np.testing.assert_allclose(rule.points, [[1 / 3, 1 / 3]])
    assert rule.weights[0] == 0.5


def test_degree_five_has_seven_points():
    rule = triangle_rule(5)
    assert len(rule) == 7
    x, y = rule.points.T
    assert np.dot(rule.weights, x**2 * y**3) == pytest.approx(monomial_integral(2, 3), rel=1e-13)


def test_degree_five_is_not_exact_for_degree_six():
    rule = triangle_rule(5)
    x, y = rule.points.T
    assert abs(np.dot(rule.weights, x**6) - monomial_integral(6, 0)) > 1e-8


@pytest.mark.parametrize("degree", [4, 6, 8, 0])
def test_unsupported_triangle_degree(degree):
    with pytest.raises(ValueError):
        triangle_rule(degree)


@pytest.mark.parametrize("degree,npts", [(1, 1), (2, 2), (3, 2), (5, 3), (7, 4)])
def test_segment_rule(degree, npts):
    rule = segment_rule(degree)
    assert len(rule) == npts
    assert rule.weights.sum() == pytest.approx(1.0, abs=1e-15)
    for k in range(degree + 1):
        assert np.dot(rule.weights, rule.points**k) == pytest.approx(1.0 / (k + 1), abs=1e-15)


def test_segment_midpoint():
    rule = segment_rule(1)
    assert rule.points[0] == 0.5 and rule.weights[0] == 1.0


def test_segment_rule_rejects_zero():
    with pytest.raises(ValueError):
        segment_rule(0)


def test_integrate_constant_and_linear():
    tri = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]
    assert integrate(triangle_rule(5), tri, lambda x, y: 1.0) == pytest.approx(0.5)
    assert integrate(triangle_rule(5), tri, lambda x, y: x) == pytest.approx(1 / 6, rel=1e-14)
    other = [(0.2, 0.1), (3.0, 0.4), (1.0, 2.0)]
    area = 0.5 * abs((3.0 - 0.2) * (2.0 - 0.1) - (0.4 - 0.1) * (1.0 - 0.2))
    assert integrate(triangle_rule(1), other, lambda x, y: 1.0) == pytest.approx(area, rel=1e-14)


def test_integrate_rejects_clockwise():
    with pytest.raises(ValueError):
        integrate(triangle_rule(1), [(0, 0), (0, 1), (1, 0)], lambda x, y: 1.0)


def test_layer_integrand_degree5_vs_degree7():
    # one element of size 1/32 at the bottom boundary
    h = 1 / 32
    tri = [(0.0, 0.0), (h, 0.0), (0.0, h)]
    f = lambda x, y: np.exp(-128 * y)
    v5 = integrate(triangle_rule(5), tri, f)
    v7 = integrate(triangle_rule(7), tri, f)
    assert abs(v5 - v7) / abs(v7) <= 1e-3


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=6, max_size=6),
       st.integers(0, 5), st.integers(0, 5))
def test_affine_invariance(coords, a, b):
    p = np.array(coords).reshape(3, 2)
    jac = np.column_stack([p[1] - p[0], p[2] - p[0]])
    det = np.linalg.det(jac)
    if det < 1e-3:
        p = p[[0, 2, 1]]
        jac = np.column_stack([p[1] - p[0], p[2] - p[0]])
        det = np.linalg.det(jac)
    if det < 1e-3 or a + b > 5:
        return
    inv = np.linalg.inv(jac)

    def pulled(x, y):
        # reference coordinates of a physical point
        xi = inv[0, 0] * (x - p[0, 0]) + inv[0, 1] * (y - p[0, 1])
        eta = inv[1, 0] * (x - p[0, 0]) + inv[1, 1] * (y - p[0, 1])
        return xi**a * eta**b

    got = integrate(triangle_rule(5), p, pulled)
    assert got == pytest.approx(det * monomial_integral(a, b), rel=1e-12, abs=1e-13)
