"""Discrete error norms and the convergence indicator."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .assembly import DofMap
from .elements import cr_eval_mesh, cr_gradients_mesh, element_points
from .exact import ExactSolution
from .mesh import Mesh, mesh_size
from .quadrature import triangle_rule

__all__ = [
    "DiscreteSolution",
    "broken_h1_seminorm_sq",
    "jump_seminorm_sq",
    "hwop_norm",
    "energy_error",
    "energy_error_parts",
    "l2_error",
    "l2_norm_discrete",
    "reference_norms",
    "source_l2_norm",
    "convergence_indicator",
]


@dataclass
class DiscreteSolution:
    """CR coefficients ``(Ne, 3)`` and face multipliers ``(Nf,)``."""

    mesh: Mesh
    cr: np.ndarray
    multipliers: np.ndarray
    beta: float = 1.0

    @classmethod
    def from_reduced(cls, mesh: Mesh, dofmap: DofMap, x, beta: float = 1.0):
        cr, lam = dofmap.split(x)
        return cls(mesh, cr, lam, beta)

    @classmethod
    def zero(cls, mesh: Mesh) -> "DiscreteSolution":
        return cls(mesh, np.zeros((mesh.n_elements, 3)), np.zeros(mesh.n_faces))


def _broadcast_eval(fun, x):
    return np.broadcast_to(np.asarray(fun(x[..., 0], x[..., 1]), dtype=float), x.shape[:-1])


def broken_h1_seminorm_sq(mesh: Mesh, cr: np.ndarray) -> float:
    g = cr_gradients_mesh(mesh, cr)
    return float(np.dot(mesh.areas, (g * g).sum(axis=1)))


def jump_seminorm_sq(mesh: Mesh, cr: np.ndarray, multipliers: np.ndarray,
                     beta: float = 1.0, h_global: float | None = None) -> float:
    """``sum_T sum_F kappa_{F(beta)} |F| (lambda_F - m_{T,F})^2``.

    ``kappa |F| = h^{-2 beta} |F| / ell_{T,F} = h^{-2 beta} |F|^2 / (2 |T|)``.
    """
    h = mesh_size(mesh) if h_global is None else h_global
    flen = mesh.face_lengths[mesh.element_faces]
    w = h ** (-2.0 * beta) * flen * flen / (2.0 * mesh.areas[:, None])
    d = multipliers[mesh.element_faces] - cr
    return float((w * d * d).sum())


def hwop_norm(sol: DiscreteSolution, beta: float = 1.0) -> float:
    """``|(u_h, lambda_h)|_{hwop(beta)}`` of a discrete pair."""
    return math.sqrt(broken_h1_seminorm_sq(sol.mesh, sol.cr)
                     + jump_seminorm_sq(sol.mesh, sol.cr, sol.multipliers, beta))


def energy_error_parts(sol: DiscreteSolution, exact: ExactSolution,
                       degree: int = 5) -> tuple[float, float]:
    """Squared volume and jump parts of ``|u^H - u_h^H|_{hwop(1)}``.

    The jump part uses ``Pi_F^0((u - u_h) - (u - lambda_h)) = lambda_h - m_{T,F}``.
    """
    mesh = sol.mesh
    rule = triangle_rule(degree)
    x = element_points(mesh, rule)
    gx, gy = exact.grad_u(x[..., 0], x[..., 1])
    gh = cr_gradients_mesh(mesh, sol.cr)
    ex = np.broadcast_to(gx, x.shape[:-1]) - gh[:, 0:1]
    ey = np.broadcast_to(gy, x.shape[:-1]) - gh[:, 1:2]
    vol = float(((ex * ex + ey * ey) @ rule.weights) @ (2.0 * mesh.areas))
    jump = jump_seminorm_sq(mesh, sol.cr, sol.multipliers, beta=1.0)
    return vol, jump


def energy_error(sol: DiscreteSolution, exact: ExactSolution, degree: int = 5) -> float:
    vol, jump = energy_error_parts(sol, exact, degree)
    return math.sqrt(vol + jump)


def l2_error(sol: DiscreteSolution, exact: ExactSolution, degree: int = 5) -> float:
    """``||u - u_h||_{L2}``."""
    mesh = sol.mesh
    rule = triangle_rule(degree)
    x = element_points(mesh, rule)
    e = _broadcast_eval(exact.u, x) - cr_eval_mesh(sol.cr, rule.barycentric)
    return math.sqrt(float(((e * e) @ rule.weights) @ (2.0 * mesh.areas)))


def l2_norm_discrete(sol: DiscreteSolution) -> float:
    """``||u_h||_{L2}``, exact for piecewise linears (degree-2 rule)."""
    rule = triangle_rule(2)
    v = cr_eval_mesh(sol.cr, rule.barycentric)
    return math.sqrt(float(((v * v) @ rule.weights) @ (2.0 * sol.mesh.areas)))


def reference_norms(exact: ExactSolution, mesh: Mesh, degree: int = 7) -> dict[str, float]:
    """``|u|_{H1}`` and ``||u||_{L2}`` by quadrature over ``mesh``."""
    rule = triangle_rule(degree)
    x = element_points(mesh, rule)
    w = 2.0 * mesh.areas
    u = _broadcast_eval(exact.u, x)
    gx, gy = exact.grad_u(x[..., 0], x[..., 1])
    gx = np.broadcast_to(gx, x.shape[:-1])
    gy = np.broadcast_to(gy, x.shape[:-1])
    return {
        "h1": math.sqrt(float(((gx * gx + gy * gy) @ rule.weights) @ w)),
        "l2": math.sqrt(float(((u * u) @ rule.weights) @ w)),
    }


def source_l2_norm(f, mesh: Mesh, degree: int = 7) -> float:
    rule = triangle_rule(degree)
    x = element_points(mesh, rule)
    v = _broadcast_eval(f, x)
    return math.sqrt(float(((v * v) @ rule.weights) @ (2.0 * mesh.areas)))


def convergence_indicator(e_h: float, e_h2: float) -> float:
    """``log(e_h / e_{h/2}) / log 2``."""
    if not (e_h > 0 and e_h2 > 0):
        raise ValueError("errors must be positive")
    return math.log(e_h / e_h2) / math.log(2.0)
