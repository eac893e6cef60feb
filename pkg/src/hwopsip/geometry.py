"""Anisotropy metrics of triangles.

For a triangle with vertices relabelled so that ``p2-p3`` is the longest
edge, ``h1 = |p1 - p2|`` and ``h2 = |p1 - p3|`` (``h2 <= h1``) and the unit
vectors ``r1, r2`` point from ``p1`` along those edges.  The anisotropy
parameter is ``H_T = h1 h2 h_T / |T|``; a mesh family is semi-regular when
``H_T / h_T`` stays bounded.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import TextIO

import numpy as np

from .mesh import Mesh

__all__ = [
    "DegenerateTriangleError",
    "ElementGeometry",
    "characterize",
    "characterize_mesh",
    "ell_of",
    "ell",
    "semi_regularity",
    "write_audit_csv",
    "AREA_TOL",
]

AREA_TOL = 1e-14


class DegenerateTriangleError(ValueError):
    pass


@dataclass(frozen=True)
class ElementGeometry:
    area: float
    h_T: float
    h1: float
    h2: float
    r1: np.ndarray
    r2: np.ndarray
    H_T: float
    ell: np.ndarray
    max_angle: float
    vertices: np.ndarray

    @property
    def ratio(self) -> float:
        return self.H_T / self.h_T


def _signed_area(p) -> float:
    return 0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1])
                  - (p[1][1] - p[0][1]) * (p[2][0] - p[0][0]))


def _angles(a: float, b: float, c: float) -> np.ndarray:
    # interior angles opposite sides a, b, c
    def ang(opp, s1, s2):
        return np.arccos(np.clip((s1 * s1 + s2 * s2 - opp * opp) / (2 * s1 * s2), -1.0, 1.0))
    return np.array([ang(a, b, c), ang(b, c, a), ang(c, a, b)])


def characterize(vertices) -> ElementGeometry:
    """Relabel a triangle's vertices and compute its anisotropy record.

    Ties between equally long edges are broken by the lexicographically
    smallest sorted pair of input vertex indices.

    Raises
    ------
    DegenerateTriangleError
        If the triangle's area does not exceed ``AREA_TOL``.
    """
    p = np.asarray(vertices, dtype=float).reshape(3, 2)
    area = abs(_signed_area(p))
    if area <= AREA_TOL:
        raise DegenerateTriangleError(f"degenerate triangle (area={area:.3e})")
    pairs = [(0, 1), (0, 2), (1, 2)]
    lengths = {pr: float(np.linalg.norm(p[pr[0]] - p[pr[1]])) for pr in pairs}
    # longest edge first, smallest pair on ties
    longest = min(pairs, key=lambda pr: (-lengths[pr], pr))
    i1 = ({0, 1, 2} - set(longest)).pop()
    a, b = longest
    ea, eb = tuple(sorted((i1, a))), tuple(sorted((i1, b)))
    # p2 ends the longer of the two remaining edges (h2 <= h1)
    if (-lengths[ea], ea) <= (-lengths[eb], eb):
        i2, i3 = a, b
    else:
        i2, i3 = b, a
    p1, p2, p3 = p[i1], p[i2], p[i3]
    h_T = lengths[longest]
    h1 = float(np.linalg.norm(p2 - p1))
    h2 = float(np.linalg.norm(p3 - p1))
    r1 = (p2 - p1) / h1
    r2 = (p3 - p1) / h2
    H_T = h1 * h2 * h_T / area
    # face i opposite input vertex i
    face_len = np.array([lengths[(1, 2)], lengths[(0, 2)], lengths[(0, 1)]])
    ell_vals = 2.0 * area / face_len
    angles = _angles(*face_len)
    return ElementGeometry(
        area=area, h_T=h_T, h1=h1, h2=h2, r1=r1, r2=r2, H_T=H_T,
        ell=ell_vals, max_angle=float(angles.max()),
        vertices=np.array([p1, p2, p3]),
    )


def ell_of(vertices, face: int) -> float:
    """Altitude ``2|T| / |F|`` of the triangle over its local face ``face``.

    Local face ``i`` is the edge opposite vertex ``i``.
    """
    p = np.asarray(vertices, dtype=float).reshape(3, 2)
    area = abs(_signed_area(p))
    if area <= AREA_TOL:
        raise DegenerateTriangleError(f"degenerate triangle (area={area:.3e})")
    q, r = p[(face + 1) % 3], p[(face + 2) % 3]
    return 2.0 * area / float(np.linalg.norm(q - r))


def ell(mesh: Mesh) -> np.ndarray:
    """``(Ne, 3)`` array of ``l_{T,F}`` for every element/local face pair."""
    return 2.0 * mesh.areas[:, None] / mesh.face_lengths[mesh.element_faces]


def characterize_mesh(mesh: Mesh) -> dict[str, np.ndarray]:
    """Vectorised per-element metrics: area, hT, h1, h2, HT, ratio, max_angle."""
    p = mesh.element_coords()
    side = np.stack([
        np.linalg.norm(p[:, 1] - p[:, 2], axis=1),
        np.linalg.norm(p[:, 2] - p[:, 0], axis=1),
        np.linalg.norm(p[:, 0] - p[:, 1], axis=1),
    ], axis=1)
    area = mesh.areas
    s = np.sort(side, axis=1)
    h2, h1, hT = s[:, 0], s[:, 1], s[:, 2]
    HT = h1 * h2 * hT / area
    a, b, c = side.T
    cosines = np.stack([
        (b * b + c * c - a * a) / (2 * b * c),
        (c * c + a * a - b * b) / (2 * c * a),
        (a * a + b * b - c * c) / (2 * a * b),
    ], axis=1)
    max_angle = np.arccos(np.clip(cosines.min(axis=1), -1.0, 1.0))
    return {
        "area": area, "hT": hT, "h1": h1, "h2": h2, "HT": HT,
        "ratio": HT / hT, "max_angle": max_angle,
    }


def semi_regularity(mesh: Mesh) -> tuple[float, np.ndarray]:
    """Return ``max_T H_T/h_T`` and the per-element ratios."""
    ratios = characterize_mesh(mesh)["ratio"]
    return float(ratios.max()), ratios


def write_audit_csv(mesh: Mesh, stream: TextIO) -> None:
    """Per-element CSV ``elem,area,hT,h1,h2,HT,ratio,max_angle``."""
    g = characterize_mesh(mesh)
    cols = ["area", "hT", "h1", "h2", "HT", "ratio", "max_angle"]
    stream.write("elem," + ",".join(cols) + "\n")
    data = np.column_stack([g[c] for c in cols])
    for k, row in enumerate(data):
        stream.write(f"{k}," + ",".join(f"{v:.10g}" for v in row) + "\n")
