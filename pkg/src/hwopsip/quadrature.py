"""Quadrature rules on the reference triangle and the unit segment.

Triangle rules use barycentric-free reference coordinates ``(x, y)`` on the
triangle with vertices ``(0, 0), (1, 0), (0, 1)``; weights sum to its area 1/2.
Segment rules live on ``[0, 1]`` with weights summing to 1.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "QuadRule",
    "triangle_rule",
    "segment_rule",
    "integrate",
    "composite_triangle_rule",
    "composite_segment_rule",
    "SUPPORTED_TRIANGLE_DEGREES",
]

SUPPORTED_TRIANGLE_DEGREES = (1, 2, 3, 5, 7)


@dataclass(frozen=True)
class QuadRule:
    """Points, weights and the polynomial degree integrated exactly."""

    points: np.ndarray
    weights: np.ndarray
    degree: int

    def __len__(self) -> int:
        return len(self.weights)

    @property
    def barycentric(self) -> np.ndarray:
        """Barycentric coordinates ``(l0, l1, l2)`` of triangle points."""
        x, y = self.points[:, 0], self.points[:, 1]
        return np.column_stack([1.0 - x - y, x, y])


def _orbit3(a):
    # S21 orbit: barycentrics (a, a, 1-2a) and permutations
    b = 1.0 - 2.0 * a
    return [(a, a, b), (a, b, a), (b, a, a)]


def _orbit6(a, b):
    c = 1.0 - a - b
    return [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)]


def _from_bary(groups):
    pts, wts = [], []
    for w, bary in groups:
        for l0, l1, l2 in bary:
            pts.append((l1, l2))
            wts.append(w)
    # weights are tabulated for unit area
    return np.array(pts, dtype=float), 0.5 * np.array(wts, dtype=float)


@lru_cache(maxsize=None)
def triangle_rule(degree: int) -> QuadRule:
    """Symmetric quadrature on the reference triangle.

    Parameters
    ----------
    degree : int
        Requested exactness; one of ``1, 2, 3, 5, 7``.

    Raises
    ------
    ValueError
        If the degree is not in the supported set.
    """
    if degree == 1:
        groups = [(1.0, [(1 / 3, 1 / 3, 1 / 3)])]
    elif degree == 2:
        groups = [(1 / 3, _orbit3(1 / 6))]
    elif degree == 3:
        groups = [(-27 / 48, [(1 / 3, 1 / 3, 1 / 3)]), (25 / 48, _orbit3(0.2))]
    elif degree == 5:
        # Radon's 7-point rule, closed form
        s = np.sqrt(15.0)
        groups = [
            (9 / 40, [(1 / 3, 1 / 3, 1 / 3)]),
            ((155 - s) / 1200, _orbit3((6 - s) / 21)),
            ((155 + s) / 1200, _orbit3((6 + s) / 21)),
        ]
    elif degree == 7:
        # Dunavant's 13-point rule; negative centroid weight
        groups = [
            (-0.149570044467682, [(1 / 3, 1 / 3, 1 / 3)]),
            (0.175615257433208, _orbit3(0.260345966079040)),
            (0.053347235608838, _orbit3(0.065130102902216)),
            (0.077113760890257, _orbit6(0.048690315425316, 0.312865496004874)),
        ]
    else:
        raise ValueError(
            f"unsupported triangle quadrature degree {degree}; "
            f"choose from {SUPPORTED_TRIANGLE_DEGREES}"
        )
    points, weights = _from_bary(groups)
    return QuadRule(points, weights, degree)


@lru_cache(maxsize=None)
def segment_rule(degree: int) -> QuadRule:
    """Gauss-Legendre rule on ``[0, 1]`` exact for polynomials of ``degree``."""
    if degree < 1:
        raise ValueError("degree must be >= 1")
    n = (degree + 2) // 2
    x, w = np.polynomial.legendre.leggauss(n)
    return QuadRule(0.5 * (x + 1.0), 0.5 * w, 2 * n - 1)


@lru_cache(maxsize=None)
def composite_triangle_rule(degree: int, subdivisions: int) -> QuadRule:
    """Apply ``triangle_rule(degree)`` on each of the ``k^2`` congruent
    sub-triangles of a uniform ``k``-fold refinement of the reference triangle.
    """
    base = triangle_rule(degree)
    k = int(subdivisions)
    if k < 1:
        raise ValueError("subdivisions must be >= 1")
    if k == 1:
        return base
    pts, wts = [], []
    scale = 1.0 / k
    for i in range(k):
        for j in range(k - i):
            # upward sub-triangle with corner (i, j) / k
            pts.append((np.array([i, j]) + base.points) * scale)
            wts.append(base.weights * scale * scale)
            if i + j < k - 1:
                # downward sub-triangle: corner (i+1, j+1) / k, reflected
                pts.append((np.array([i + 1, j + 1]) - base.points) * scale)
                wts.append(base.weights * scale * scale)
    return QuadRule(np.concatenate(pts), np.concatenate(wts), degree)


@lru_cache(maxsize=None)
def composite_segment_rule(degree: int, subdivisions: int) -> QuadRule:
    """``segment_rule(degree)`` on each of ``k`` equal pieces of ``[0, 1]``."""
    base = segment_rule(degree)
    k = int(subdivisions)
    if k < 1:
        raise ValueError("subdivisions must be >= 1")
    offsets = np.arange(k)[:, None]
    pts = ((offsets + base.points[None, :]) / k).ravel()
    wts = np.tile(base.weights / k, k)
    return QuadRule(pts, wts, base.degree)


def integrate(rule: QuadRule, vertices, integrand) -> float:
    """Integrate ``integrand(x1, x2)`` over the triangle with given vertices.

    ``vertices`` is a 3x2 array; the affine map sends the reference triangle
    onto it and the weighted sum is scaled by ``|det J|``.
    """
    p = np.asarray(vertices, dtype=float)
    jac = np.column_stack([p[1] - p[0], p[2] - p[0]])
    det = np.linalg.det(jac)
    if det <= 0.0:
        raise ValueError("element map must have positive Jacobian determinant")
    x = p[0] + rule.points @ jac.T
    vals = np.asarray(integrand(x[:, 0], x[:, 1]), dtype=float)
    return float(det * np.dot(rule.weights, np.broadcast_to(vals, rule.weights.shape)))
