"""Assembly of the hybrid weakly over-penalised interior penalty system.

Unknowns are three CR face-mean coefficients per element plus one constant
multiplier per face.  The bilinear form is the broken Dirichlet integral
plus, for every element ``T`` and face ``F`` of ``T``,

    kappa_F * |F| * (m_{T,F} - lambda_F) * (m'_{T,F} - mu_F),
    kappa_F = h^{-2 beta} / ell_{T,F},

where ``m_{T,F}`` is the CR coefficient (equal to the face mean) and ``h``
the global mesh size.  Boundary multipliers are fixed to zero and removed.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, TextIO

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .elements import barycentric_gradients, element_points
from .geometry import ell
from .mesh import Mesh, mesh_size
from .quadrature import triangle_rule

__all__ = [
    "DofMap",
    "CsrMatrix",
    "PenaltyParams",
    "System",
    "assemble_system",
    "stiffness_blocks",
    "penalty_weights",
    "load_vector",
    "apply_operator",
    "residual",
]


@dataclass(frozen=True)
class DofMap:
    """Global numbering of CR coefficients and face multipliers.

    Full numbering: CR dof ``(e, i)`` is ``3 e + i``, face ``f`` is
    ``n_cr + f``.  The reduced numbering drops constrained (boundary) faces
    and keeps the relative order of the rest.
    """

    n_cr: int
    n_face: int
    constrained: np.ndarray

    @classmethod
    def from_mesh(cls, mesh: Mesh) -> "DofMap":
        return cls(3 * mesh.n_elements, mesh.n_faces, mesh.is_boundary_face.copy())

    @property
    def n_total(self) -> int:
        """``#Np``: all unknowns including boundary multipliers."""
        return self.n_cr + self.n_face

    @property
    def free_faces(self) -> np.ndarray:
        return np.flatnonzero(~self.constrained)

    @property
    def n_free(self) -> int:
        return self.n_cr + int(np.count_nonzero(~self.constrained))

    def cr_index(self, elem, local):
        return 3 * np.asarray(elem) + np.asarray(local)

    def face_index(self, face):
        return self.n_cr + np.asarray(face)

    @property
    def reduced_face_index(self) -> np.ndarray:
        """Reduced index of every face, ``-1`` for constrained ones."""
        out = np.full(self.n_face, -1, dtype=np.int64)
        free = self.free_faces
        out[free] = self.n_cr + np.arange(len(free))
        return out

    def split(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Reduced vector -> ``((Ne, 3) CR coefficients, (Nf,) multipliers)``."""
        x = np.asarray(x, dtype=float)
        if len(x) != self.n_free:
            raise ValueError(f"expected reduced vector of length {self.n_free}")
        lam = np.zeros(self.n_face)
        lam[self.free_faces] = x[self.n_cr:]
        return x[: self.n_cr].reshape(-1, 3), lam

    def join(self, cr: np.ndarray, lam: np.ndarray) -> np.ndarray:
        return np.concatenate([np.ravel(cr), np.asarray(lam)[self.free_faces]])


class CsrMatrix:
    """Square sparse matrix in compressed-row layout (sorted columns)."""

    def __init__(self, indptr, indices, data, n: int):
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.indices = np.ascontiguousarray(indices, dtype=np.int64)
        self.data = np.ascontiguousarray(data, dtype=np.float64)
        self.n = int(n)

    @classmethod
    def from_coo(cls, rows, cols, vals, n: int) -> "CsrMatrix":
        m = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
        m.sum_duplicates()
        m.sort_indices()
        return cls(m.indptr, m.indices, m.data, n)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n, self.n)

    @property
    def nnz(self) -> int:
        return len(self.data)

    def to_scipy(self) -> sp.csr_matrix:
        return sp.csr_matrix((self.data, self.indices, self.indptr), shape=self.shape)

    def toarray(self) -> np.ndarray:
        return self.to_scipy().toarray()

    def matvec(self, x: np.ndarray) -> np.ndarray:
        x = np.ascontiguousarray(x, dtype=np.float64)
        if x.shape != (self.n,):
            raise ValueError(f"dimension mismatch: matrix {self.n}, vector {x.shape}")
        y = np.empty(self.n)
        _kernels.csr_matvec(self.indptr, self.indices, self.data, x, y)
        return y

    __matmul__ = matvec

    def diagonal(self) -> np.ndarray:
        return self.to_scipy().diagonal()

    def write_matrix_market(self, stream: TextIO) -> None:
        """Lower triangle in MatrixMarket ``coordinate real symmetric`` form."""
        coo = sp.tril(self.to_scipy()).tocoo()
        order = np.lexsort((coo.row, coo.col))
        stream.write("%%MatrixMarket matrix coordinate real symmetric\n")
        stream.write(f"{self.n} {self.n} {coo.nnz}\n")
        for i, j, v in zip(coo.row[order].tolist(), coo.col[order].tolist(),
                           coo.data[order].tolist()):
            stream.write(f"{i + 1} {j + 1} {v!r}\n")


@dataclass(frozen=True)
class PenaltyParams:
    beta: float = 1.0
    h_global: float | None = None

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("beta must be positive")

    def kappa(self, mesh: Mesh) -> np.ndarray:
        """``(Ne, 3)`` penalty ``h^{-2 beta} / ell_{T,F}``."""
        h = mesh_size(mesh) if self.h_global is None else self.h_global
        return h ** (-2.0 * self.beta) / ell(mesh)


@dataclass
class System:
    matrix: CsrMatrix
    rhs: np.ndarray
    dofmap: DofMap


def stiffness_blocks(mesh: Mesh) -> np.ndarray:
    """``(Ne, 3, 3)`` CR stiffness ``|T| grad theta_i . grad theta_j``."""
    grads = barycentric_gradients(mesh.element_coords())
    return 4.0 * mesh.areas[:, None, None] * np.einsum("eid,ejd->eij", grads, grads)


def penalty_weights(mesh: Mesh, params: PenaltyParams) -> np.ndarray:
    """``(Ne, 3)`` weights ``kappa_{F(beta)} |F|`` per element/face incidence."""
    return params.kappa(mesh) * mesh.face_lengths[mesh.element_faces]


def load_vector(mesh: Mesh, f: Callable, degree: int = 5) -> np.ndarray:
    """``(Ne, 3)`` entries ``int_T f theta_i``."""
    rule = triangle_rule(degree)
    x = element_points(mesh, rule)
    fx = np.broadcast_to(np.asarray(f(x[..., 0], x[..., 1]), dtype=float), x.shape[:-1])
    theta = 1.0 - 2.0 * rule.barycentric          # (Q, 3)
    wf = fx * rule.weights * (2.0 * mesh.areas)[:, None]
    return wf @ theta


def assemble_system(mesh: Mesh, f: Callable | None,
                    params: PenaltyParams | None = None,
                    quad_degree: int = 5) -> System:
    """Assemble the reduced (boundary multipliers eliminated) system.

    ``f=None`` assembles a zero right-hand side.
    """
    params = params or PenaltyParams()
    if np.any(mesh.areas <= 0):
        raise ValueError("degenerate or clockwise element")
    dofs = DofMap.from_mesh(mesh)
    ne = mesh.n_elements
    n = dofs.n_free

    K = stiffness_blocks(mesh)
    cr = np.arange(3 * ne).reshape(ne, 3)
    rows = [np.broadcast_to(cr[:, :, None], K.shape).ravel()]
    cols = [np.broadcast_to(cr[:, None, :], K.shape).ravel()]
    vals = [K.ravel()]

    w = penalty_weights(mesh, params).ravel()
    c_idx = cr.ravel()
    f_idx = dofs.reduced_face_index[mesh.element_faces].ravel()
    rows.append(c_idx)
    cols.append(c_idx)
    vals.append(w)
    free = f_idx >= 0
    cf, ff, wf = c_idx[free], f_idx[free], w[free]
    rows += [cf, ff, ff]
    cols += [ff, cf, ff]
    vals += [-wf, -wf, wf]

    matrix = CsrMatrix.from_coo(np.concatenate(rows), np.concatenate(cols),
                                np.concatenate(vals), n)
    rhs = np.zeros(n)
    if f is not None:
        rhs[: 3 * ne] = load_vector(mesh, f, quad_degree).ravel()
    return System(matrix, rhs, dofs)


def apply_operator(matrix: CsrMatrix, x: np.ndarray) -> np.ndarray:
    return matrix.matvec(x)


def residual(matrix: CsrMatrix, x: np.ndarray, b: np.ndarray) -> float:
    """``||b - A x||_2``."""
    b = np.asarray(b, dtype=float)
    if b.shape != (matrix.n,):
        raise ValueError("dimension mismatch")
    return float(np.linalg.norm(b - matrix.matvec(x)))
