"""Unpreconditioned conjugate gradients for the assembled SPD system."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .assembly import CsrMatrix

__all__ = ["SolveReport", "CgBreakdown", "cg_solve", "dense_solve"]

log = logging.getLogger(__name__)


class CgBreakdown(ArithmeticError):
    """Raised when ``p . A p <= 0``: the matrix is not positive definite."""


@dataclass
class SolveReport:
    iterations: int
    residual: float
    converged: bool
    seconds: float
    backend: str = ""
    orthogonality: list = field(default_factory=list)


def cg_solve(matrix: CsrMatrix, b, tol: float = 1e-10, max_iter: int | None = None,
             x0=None, stride: int = 100, log_every: int = 0):
    """Solve ``A x = b`` by conjugate gradients without preconditioning.

    Stops when ``||b - A x|| / ||b|| <= tol`` (recurrence residual) or after
    ``max_iter`` iterations (default ``20 n``).  Every ``stride`` iterations
    the normalised inner product of consecutive residuals is recorded in
    ``report.orthogonality``; progress is logged every ``log_every``
    iterations when positive.

    Returns
    -------
    x : ndarray
    report : SolveReport

    Raises
    ------
    CgBreakdown
        On a non-positive curvature ``p . A p``.
    ValueError
        On dimension mismatch or non-positive ``tol``.
    """
    n = matrix.n
    b = np.ascontiguousarray(b, dtype=np.float64)
    if b.shape != (n,):
        raise ValueError(f"dimension mismatch: matrix {n}, rhs {b.shape}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iter is None:
        max_iter = 20 * n
    start = time.perf_counter()

    x = np.zeros(n) if x0 is None else np.array(x0, dtype=np.float64)
    bnorm = float(np.linalg.norm(b))
    if bnorm == 0.0:
        x[:] = 0.0
        return x, SolveReport(0, 0.0, True, time.perf_counter() - start, _kernels.BACKEND)
    r = b - matrix.matvec(x)
    p = r.copy()
    q = np.empty(n)
    rho = float(np.dot(r, r))
    tol2 = (tol * bnorm) ** 2

    iterations = 0
    orth_samples = []
    chunk = max(1, stride)
    while iterations < max_iter and rho > tol2:
        steps = min(chunk, max_iter - iterations)
        done, rho_new, orth, rho_old, status = _kernels.cg_chunk(
            matrix.indptr, matrix.indices, matrix.data, x, r, p, q, rho, tol2, steps)
        iterations += done
        if status:
            raise CgBreakdown(f"p.Ap <= 0 at iteration {iterations}: matrix not SPD")
        if done and rho_new > 0:
            orth_samples.append(abs(orth) / np.sqrt(rho_new * rho_old))
        rho = rho_new
        if log_every and iterations % log_every < chunk:
            log.info("cg iter %d  rel.res %.3e", iterations, np.sqrt(rho) / bnorm)

    relres = float(np.sqrt(rho) / bnorm)
    report = SolveReport(
        iterations=iterations,
        residual=relres,
        converged=rho <= tol2,
        seconds=time.perf_counter() - start,
        backend=_kernels.BACKEND,
        orthogonality=orth_samples,
    )
    return x, report


def dense_solve(matrix: CsrMatrix, b) -> np.ndarray:
    """Direct dense solve; only for small test systems (``n <= 200``)."""
    if matrix.n > 200:
        raise ValueError("dense_solve is limited to n <= 200")
    return np.linalg.solve(matrix.toarray(), np.asarray(b, dtype=float))
