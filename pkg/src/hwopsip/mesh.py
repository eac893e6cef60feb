"""Structured triangulations of the unit square and their face connectivity.

Four grid families are supported: uniform, Shishkin (piecewise uniform in
``x2`` with a transition point), cosine-graded and quadratic-graded.  Each
grid cell is split by its lower-left to upper-right diagonal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import TextIO

import numpy as np

__all__ = [
    "Family",
    "MeshFamily",
    "Mesh",
    "grid_points",
    "generate",
    "from_grid",
    "mesh_size",
    "boundary_faces",
    "write_mesh",
    "read_mesh",
]


class Family(str, Enum):
    STANDARD = "standard"
    SHISHKIN = "shishkin"
    COSINE = "cosine"
    QUADRATIC = "quadratic"

    @classmethod
    def parse(cls, name: str) -> "Family":
        aliases = {
            "i": cls.STANDARD, "1": cls.STANDARD,
            "ii": cls.SHISHKIN, "2": cls.SHISHKIN,
            "iii": cls.COSINE, "3": cls.COSINE, "cosinegraded": cls.COSINE,
            "iv": cls.QUADRATIC, "4": cls.QUADRATIC,
            "quadraticgraded": cls.QUADRATIC,
        }
        key = name.strip().lower()
        if key in aliases:
            return aliases[key]
        return cls(key)


@dataclass(frozen=True)
class MeshFamily:
    """A grid family together with its division count ``N``."""

    tag: Family
    N: int
    delta: float = 1.0 / 128.0

    def __post_init__(self):
        object.__setattr__(self, "tag", Family.parse(self.tag)
                           if isinstance(self.tag, str) else self.tag)
        if self.N < 2 or self.N % 2:
            raise ValueError(f"N must be an even integer >= 2, got {self.N}")
        if self.tag is Family.SHISHKIN:
            if self.delta <= 0:
                raise ValueError("delta must be positive")
            if self.tau >= 1.0:
                raise ValueError(
                    f"Shishkin transition point tau={self.tau:.6g} must be < 1")

    @property
    def tau(self) -> float:
        """Shishkin transition point ``4 delta |ln N|``."""
        return 4.0 * self.delta * abs(math.log(self.N))


def grid_points(family: MeshFamily) -> tuple[np.ndarray, np.ndarray]:
    """Return the 1D grid coordinates ``(x1, x2)``, each of length ``N + 1``."""
    N = family.N
    i = np.arange(N + 1, dtype=float)
    x1 = i / N
    if family.tag is Family.STANDARD:
        x2 = i / N
    elif family.tag is Family.SHISHKIN:
        tau = family.tau
        half = N // 2
        x2 = np.empty(N + 1)
        x2[: half + 1] = tau * (2.0 / N) * i[: half + 1]
        x2[half + 1:] = tau + (1.0 - tau) * (2.0 / N) * (i[half + 1:] - half)
    elif family.tag is Family.COSINE:
        x2 = 0.5 * (1.0 - np.cos(i * np.pi / N))
    elif family.tag is Family.QUADRATIC:
        x2 = (i / N) ** 2
    else:  # pragma: no cover
        raise ValueError(family.tag)
    return x1, x2


@dataclass(frozen=True, eq=False)
class Mesh:
    """Conformal triangulation with oriented faces.

    Attributes
    ----------
    vertices : (Nv, 2) float array
    triangles : (Ne, 3) int array, counter-clockwise
    face_vertices : (Nf, 2) int array
    face_elements : (Nf, 2) int array; column 0 is the lower-indexed element,
        column 1 the higher one or ``-1`` on the boundary
    element_faces : (Ne, 3) int array; local face ``i`` is opposite vertex ``i``
    element_signs : (Ne, 3) float array of ``+1/-1``; ``sign * normals[f]`` is
        the outward normal of the element on face ``f``
    normals : (Nf, 2) unit face normals, outward for the first element
    face_lengths : (Nf,) float array
    """

    vertices: np.ndarray
    triangles: np.ndarray
    face_vertices: np.ndarray
    face_elements: np.ndarray
    element_faces: np.ndarray
    element_signs: np.ndarray
    normals: np.ndarray
    face_lengths: np.ndarray
    family: MeshFamily | None = field(default=None)

    @property
    def n_elements(self) -> int:
        return len(self.triangles)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_faces(self) -> int:
        return len(self.face_vertices)

    @property
    def is_boundary_face(self) -> np.ndarray:
        return self.face_elements[:, 1] < 0

    def element_coords(self) -> np.ndarray:
        """``(Ne, 3, 2)`` array of vertex coordinates per element."""
        return self.vertices[self.triangles]

    @property
    def areas(self) -> np.ndarray:
        p = self.element_coords()
        e1 = p[:, 1] - p[:, 0]
        e2 = p[:, 2] - p[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])


def _build_connectivity(vertices: np.ndarray, triangles: np.ndarray):
    ne = len(triangles)
    # local face i is opposite local vertex i
    local = np.array([[1, 2], [2, 0], [0, 1]])
    edges = triangles[:, local].reshape(-1, 2)
    keys = np.sort(edges, axis=1)
    uniq, first, inverse, counts = np.unique(
        keys, axis=0, return_index=True, return_inverse=True, return_counts=True)
    inverse = inverse.ravel()
    if np.any(counts > 2):
        raise ValueError("non-conformal mesh: a face is shared by more than two elements")
    # number faces in order of first appearance
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    face_of_slot = rank[inverse]
    nf = len(uniq)
    face_vertices = edges[first[order]]

    elem_of_slot = np.repeat(np.arange(ne), 3)
    face_elements = np.full((nf, 2), -1, dtype=np.int64)
    slot_order = np.lexsort((elem_of_slot, face_of_slot))
    f_sorted = face_of_slot[slot_order]
    e_sorted = elem_of_slot[slot_order]
    starts = np.r_[True, f_sorted[1:] != f_sorted[:-1]]
    face_elements[f_sorted[starts], 0] = e_sorted[starts]
    face_elements[f_sorted[~starts], 1] = e_sorted[~starts]

    element_faces = face_of_slot.reshape(ne, 3)
    left = face_elements[element_faces, 0]
    element_signs = np.where(left == np.arange(ne)[:, None], 1.0, -1.0)

    # outward normal of the left element: edges of a CCW triangle are
    # traversed tail->head, outward normal is (dy, -dx)
    left_slot = 3 * face_elements[:, 0] + np.argmax(
        element_faces[face_elements[:, 0]] == np.arange(nf)[:, None], axis=1)
    tail, head = edges[left_slot, 0], edges[left_slot, 1]
    d = vertices[head] - vertices[tail]
    lengths = np.hypot(d[:, 0], d[:, 1])
    normals = np.column_stack([d[:, 1], -d[:, 0]]) / lengths[:, None]
    return face_vertices, face_elements, element_faces, element_signs, normals, lengths


def from_grid(x1: np.ndarray, x2: np.ndarray, family: MeshFamily | None = None) -> Mesh:
    """Triangulate the tensor grid ``x1 x x2`` with lower-left/upper-right diagonals."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    n1, n2 = len(x1) - 1, len(x2) - 1
    X1, X2 = np.meshgrid(x1, x2)
    vertices = np.column_stack([X1.ravel(), X2.ravel()])
    j, i = np.meshgrid(np.arange(n2), np.arange(n1), indexing="ij")
    v00 = (j * (n1 + 1) + i).ravel()
    v10 = v00 + 1
    v01 = v00 + n1 + 1
    v11 = v01 + 1
    lower = np.column_stack([v00, v10, v11])
    upper = np.column_stack([v00, v11, v01])
    triangles = np.stack([lower, upper], axis=1).reshape(-1, 3).astype(np.int64)
    return Mesh(vertices, triangles, *_build_connectivity(vertices, triangles),
                family=family)


def generate(family: MeshFamily) -> Mesh:
    """Build the triangulation of ``[0, 1]^2`` for a grid family."""
    x1, x2 = grid_points(family)
    return from_grid(x1, x2, family)


def from_triangles(vertices, triangles) -> Mesh:
    """Build a mesh from explicit vertices and CCW triangles."""
    vertices = np.asarray(vertices, dtype=float)
    triangles = np.asarray(triangles, dtype=np.int64)
    return Mesh(vertices, triangles, *_build_connectivity(vertices, triangles))


def mesh_size(mesh: Mesh) -> float:
    """Largest element diameter ``h = max_T h_T``."""
    p = mesh.element_coords()
    d = np.stack([p[:, 1] - p[:, 2], p[:, 2] - p[:, 0], p[:, 0] - p[:, 1]], axis=1)
    return float(np.max(np.hypot(d[..., 0], d[..., 1])))


def boundary_faces(mesh: Mesh) -> np.ndarray:
    """Sorted indices of faces with a single incident element."""
    return np.flatnonzero(mesh.is_boundary_face)


def write_mesh(mesh: Mesh, stream: TextIO) -> None:
    """Write the plain-text mesh format.

    Header ``Ne Nv Nf``, then ``x1 x2`` per vertex, ``v0 v1 v2`` per triangle
    and ``v0 v1 leftT rightT`` per face (``rightT = -1`` on the boundary).
    """
    stream.write(f"{mesh.n_elements} {mesh.n_vertices} {mesh.n_faces}\n")
    for x, y in mesh.vertices.tolist():
        stream.write(f"{x!r} {y!r}\n")
    for a, b, c in mesh.triangles.tolist():
        stream.write(f"{a} {b} {c}\n")
    for (a, b), (left, right) in zip(mesh.face_vertices.tolist(),
                                     mesh.face_elements.tolist()):
        stream.write(f"{a} {b} {left} {right}\n")


def read_mesh(stream: TextIO) -> Mesh:
    """Read a mesh written by :func:`write_mesh`; connectivity is rebuilt."""
    ne, nv, nf = (int(t) for t in stream.readline().split())
    vertices = [[float(t) for t in stream.readline().split()] for _ in range(nv)]
    triangles = [[int(t) for t in stream.readline().split()] for _ in range(ne)]
    mesh = from_triangles(vertices, triangles)
    if mesh.n_faces != nf:
        raise ValueError(f"face count mismatch: header {nf}, rebuilt {mesh.n_faces}")
    return mesh
