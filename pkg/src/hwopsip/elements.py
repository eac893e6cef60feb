"""Lowest-order Crouzeix-Raviart and Raviart-Thomas elements on triangles.

Local numbering: face ``i`` of an element is the edge opposite vertex ``i``.
CR degrees of freedom are face means; the basis dual to them is
``theta_i = 1 - 2 lambda_i`` with ``lambda_i`` the barycentric coordinates.
RT degrees of freedom are normal fluxes ``int_F v . n_F ds`` through each
face, measured with the mesh's global face normal ``n_F``; the dual basis is
``iota_i / (2|T|) (x - P_i)`` where ``iota_i = +1`` when ``n_F`` is outward.

Functions taking a single element work on a ``3x2`` vertex array; the
``*_mesh`` variants are vectorised over a whole :class:`~hwopsip.mesh.Mesh`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .mesh import Mesh
from .quadrature import (
    composite_segment_rule,
    composite_triangle_rule,
    segment_rule,
    triangle_rule,
)

__all__ = [
    "CrLocal",
    "RtLocal",
    "barycentric",
    "barycentric_gradients",
    "cr_eval",
    "cr_gradient",
    "cr_interpolate",
    "rt_eval",
    "rt_divergence",
    "rt_interpolate",
    "l2_project_element",
    "l2_project_face",
    "piola",
    "face_means",
    "cr_interpolate_mesh",
    "cr_gradients_mesh",
    "cr_eval_mesh",
    "rt_interpolate_mesh",
    "element_means",
    "commuting_defect",
]

ScalarField = Callable[[np.ndarray, np.ndarray], np.ndarray]
VectorField = Callable[[np.ndarray, np.ndarray], tuple]

FACE_QUAD_DEGREE = 5


# extended precision where the platform has it (double otherwise)
_EXT = np.longdouble


def _as_tri(vertices) -> np.ndarray:
    return np.asarray(vertices, dtype=float).reshape(3, 2)


def _signed_area(p: np.ndarray):
    e1 = p[..., 1, :] - p[..., 0, :]
    e2 = p[..., 2, :] - p[..., 0, :]
    return 0.5 * (e1[..., 0] * e2[..., 1] - e1[..., 1] * e2[..., 0])


def barycentric_gradients(vertices) -> np.ndarray:
    """Constant gradients of the barycentric coordinates.

    Works on a single ``(3, 2)`` triangle or a ``(Ne, 3, 2)`` stack.
    """
    p = np.asarray(vertices, dtype=float)
    two_area = 2.0 * _signed_area(p)
    # grad lambda_i = rot90(P_{i+2} - P_{i+1}) / (2|T|), outward-consistent for CCW
    nxt = np.roll(p, -1, axis=-2)
    nnx = np.roll(p, -2, axis=-2)
    d = nnx - nxt
    g = np.stack([-d[..., 1], d[..., 0]], axis=-1)
    return g / two_area[..., None, None]


def barycentric(vertices, point) -> np.ndarray:
    p = _as_tri(vertices)
    x = np.asarray(point, dtype=float)
    grads = barycentric_gradients(p)
    lam = 1.0 / 3.0 + (x - p.mean(axis=0)) @ grads.T
    return lam


def _face_points(a: np.ndarray, b: np.ndarray, rule):
    """Quadrature points on segments ``a -> b`` (last axis = coordinates)."""
    t = rule.points
    return a[..., None, :] + t[:, None] * (b - a)[..., None, :]


@dataclass
class CrLocal:
    """CR function on one triangle: one face-mean coefficient per face."""

    coefficients: np.ndarray
    vertices: np.ndarray
    element: int = -1


@dataclass
class RtLocal:
    """RT0 field on one triangle: flux dofs and orientation signs."""

    fluxes: np.ndarray
    signs: np.ndarray
    vertices: np.ndarray
    element: int = -1


def cr_eval(local: CrLocal, point) -> float:
    """Evaluate ``sum_i c_i (1 - 2 lambda_i(x))``."""
    lam = barycentric(local.vertices, point)
    return float(np.dot(local.coefficients, 1.0 - 2.0 * lam))


def cr_gradient(local: CrLocal) -> np.ndarray:
    return -2.0 * local.coefficients @ barycentric_gradients(local.vertices)


def _local_face_ends(p: np.ndarray):
    # face i runs from P_{i+1} to P_{i+2}
    return np.roll(p, -1, axis=-2), np.roll(p, -2, axis=-2)


def cr_interpolate(f: ScalarField, vertices, element: int = -1) -> CrLocal:
    """Face means of ``f`` computed with the 3-point Gauss rule."""
    p = _as_tri(vertices)
    rule = segment_rule(FACE_QUAD_DEGREE)
    a, b = _local_face_ends(p)
    x = _face_points(a, b, rule)
    vals = np.asarray(f(x[..., 0], x[..., 1]), dtype=float)
    return CrLocal(vals @ rule.weights, p, element)


def rt_interpolate(v: VectorField, vertices, signs=(1.0, 1.0, 1.0),
                   element: int = -1) -> RtLocal:
    """Normal-flux interpolant of ``v``.

    ``signs[i]`` is ``+1`` when the reference normal of face ``i`` is the
    outward one; fluxes are taken along the reference normal.  Fluxes are
    kept in extended precision: reconstructing the field divides long-face
    fluxes by the short height, which amplifies rounding by the aspect ratio.
    """
    p = _as_tri(vertices)
    signs = np.asarray(signs, dtype=float)
    rule = segment_rule(FACE_QUAD_DEGREE)
    c = p.astype(_EXT).mean(axis=0)
    a, b = _local_face_ends(p.astype(_EXT) - c)
    d = b - a
    x = a[:, None, :] + rule.points.astype(_EXT)[:, None] * d[:, None, :]
    v1, v2 = v(x[..., 0] + c[0], x[..., 1] + c[1])
    # length * outward normal = (dy, -dx) on a CCW triangle
    vn = (np.broadcast_to(v1, x.shape[:-1]) * d[:, None, 1]
          - np.broadcast_to(v2, x.shape[:-1]) * d[:, None, 0])
    orient = np.sign(_signed_area(p))
    fluxes = orient * signs * (vn @ rule.weights.astype(_EXT))
    return RtLocal(fluxes, signs, p, element)


def rt_eval(local: RtLocal, point) -> np.ndarray:
    """``sum_i iota_i F_i / (2|T|) (x - P_i)``, evaluated about the centroid."""
    p = local.vertices.astype(_EXT)
    c = p.mean(axis=0)
    q = p - c
    coef = np.asarray(local.fluxes, dtype=_EXT) * local.signs / (2 * abs(_signed_area(q)))
    x = np.asarray(point, dtype=float).astype(_EXT) - c
    return (coef.sum() * x - coef @ q).astype(float)


def rt_divergence(local: RtLocal) -> float:
    # div(x - P_i) = 2
    area = abs(_signed_area(local.vertices))
    return float(np.dot(local.fluxes, local.signs) / area)


def l2_project_element(f: ScalarField, vertices, degree: int = 5) -> float:
    """Mean value of ``f`` over the triangle."""
    p = _as_tri(vertices)
    rule = triangle_rule(degree)
    x = p[0] + rule.points @ np.column_stack([p[1] - p[0], p[2] - p[0]]).T
    vals = np.broadcast_to(np.asarray(f(x[:, 0], x[:, 1]), dtype=float), rule.weights.shape)
    return float(2.0 * np.dot(rule.weights, vals))


def l2_project_face(f: ScalarField, a, b, degree: int = FACE_QUAD_DEGREE) -> float:
    """Mean value of ``f`` over the segment ``a -> b``."""
    rule = segment_rule(degree)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    x = a + rule.points[:, None] * (b - a)
    vals = np.broadcast_to(np.asarray(f(x[:, 0], x[:, 1]), dtype=float), rule.weights.shape)
    return float(np.dot(rule.weights, vals))


def piola(v_hat: VectorField, A, b) -> VectorField:
    """Contravariant Piola push-forward ``v(x) = A v_hat(A^{-1}(x - b)) / det A``.

    Raises
    ------
    ValueError
        If ``A`` is singular.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    det = float(np.linalg.det(A))
    if abs(det) < 1e-300:
        raise ValueError("singular element map")
    A_inv = np.linalg.inv(A)

    def v(x1, x2):
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        y1 = x1 - b[0]
        y2 = x2 - b[1]
        xh1 = A_inv[0, 0] * y1 + A_inv[0, 1] * y2
        xh2 = A_inv[1, 0] * y1 + A_inv[1, 1] * y2
        w1, w2 = v_hat(xh1, xh2)
        w1 = np.broadcast_to(w1, xh1.shape)
        w2 = np.broadcast_to(w2, xh1.shape)
        return ((A[0, 0] * w1 + A[0, 1] * w2) / det,
                (A[1, 0] * w1 + A[1, 1] * w2) / det)

    return v


# ---------------------------------------------------------------------------
# mesh-level, vectorised


def face_means(mesh: Mesh, f: ScalarField, degree: int = FACE_QUAD_DEGREE) -> np.ndarray:
    """``Pi_F^0 f`` for every face of the mesh."""
    rule = segment_rule(degree)
    ends = mesh.vertices[mesh.face_vertices]
    x = _face_points(ends[:, 0], ends[:, 1], rule)
    vals = np.asarray(f(x[..., 0], x[..., 1]), dtype=float)
    return np.broadcast_to(vals, x.shape[:-1]) @ rule.weights


def cr_interpolate_mesh(mesh: Mesh, f: ScalarField) -> np.ndarray:
    """``(Ne, 3)`` CR coefficients of the interpolant of a continuous ``f``."""
    return face_means(mesh, f)[mesh.element_faces]


def cr_gradients_mesh(mesh: Mesh, coeffs: np.ndarray) -> np.ndarray:
    """``(Ne, 2)`` constant gradients of a broken CR function."""
    grads = barycentric_gradients(mesh.element_coords())
    return -2.0 * np.einsum("ei,eid->ed", coeffs, grads)


def cr_eval_mesh(coeffs: np.ndarray, bary: np.ndarray) -> np.ndarray:
    """Values at barycentric points ``bary`` (shape ``(Q, 3)``) on every element."""
    return coeffs @ (1.0 - 2.0 * bary).T


def element_points(mesh: Mesh, rule) -> np.ndarray:
    """``(Ne, Q, 2)`` physical quadrature points."""
    p = mesh.element_coords()
    return np.einsum("qk,ekd->eqd", rule.barycentric, p)


def element_means(mesh: Mesh, f: ScalarField, degree: int = 5,
                  subdivisions: int = 1) -> np.ndarray:
    """``Pi_h^0 f``: per-element mean values."""
    rule = composite_triangle_rule(degree, subdivisions)
    x = element_points(mesh, rule)
    vals = np.broadcast_to(np.asarray(f(x[..., 0], x[..., 1]), dtype=float), x.shape[:-1])
    return 2.0 * vals @ rule.weights


def rt_interpolate_mesh(mesh: Mesh, v: VectorField, degree: int = FACE_QUAD_DEGREE,
                        subdivisions: int = 1) -> np.ndarray:
    """Global-normal fluxes ``int_F v . n_F ds`` for every face."""
    rule = composite_segment_rule(degree, subdivisions)
    ends = mesh.vertices[mesh.face_vertices]
    x = _face_points(ends[:, 0], ends[:, 1], rule)
    v1, v2 = v(x[..., 0], x[..., 1])
    v1 = np.broadcast_to(np.asarray(v1, dtype=float), x.shape[:-1])
    v2 = np.broadcast_to(np.asarray(v2, dtype=float), x.shape[:-1])
    vn = v1 * mesh.normals[:, None, 0] + v2 * mesh.normals[:, None, 1]
    return mesh.face_lengths * (vn @ rule.weights)


def rt_divergence_mesh(mesh: Mesh, fluxes: np.ndarray) -> np.ndarray:
    """Per-element divergence of the RT field with the given face fluxes."""
    signed = (fluxes[mesh.element_faces] * mesh.element_signs).sum(axis=1)
    return signed / mesh.areas


def commuting_defect(v: VectorField, div_v: ScalarField, mesh: Mesh,
                     degree: int = 5, subdivisions: int = 1) -> float:
    """``max_T |div(I^RT v) - Pi^0 div v|`` over the mesh.

    Face fluxes and element means are both computed with degree-``degree``
    rules, composited over ``subdivisions`` pieces per face (``k^2`` per
    element) for fields that vary on a finer scale than the mesh.
    """
    lhs = rt_divergence_mesh(mesh, rt_interpolate_mesh(mesh, v, degree, subdivisions))
    rhs = element_means(mesh, div_v, degree, subdivisions)
    return float(np.max(np.abs(lhs - rhs)))
