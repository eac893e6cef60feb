"""Pure numpy implementations of the sparse kernels.

Signatures mirror the compiled ``_ckernels`` module.
"""
import numpy as np


def _row_ids(indptr):
    return np.repeat(np.arange(len(indptr) - 1), np.diff(indptr))


def csr_matvec(indptr, indices, data, x, y):
    """``y[:] = A @ x`` for a CSR matrix."""
    n = len(indptr) - 1
    y[:] = np.bincount(_row_ids(indptr), weights=data * x[indices], minlength=n)


def cg_chunk(indptr, indices, data, x, r, p, q, rho, tol2, max_steps):
    """Run up to ``max_steps`` conjugate-gradient iterations in place.

    ``x, r, p`` hold the iterate, residual and search direction; ``q`` is
    scratch.  ``rho`` is ``r . r`` on entry.  Iteration stops once
    ``rho <= tol2``.

    Returns ``(steps, rho, orth, rho_old, status)`` where ``orth`` is the inner
    product of the last two residuals, ``rho_old`` the squared norm of the
    older one, and ``status`` is 0 (running or converged) or
    1 on breakdown (``p . A p <= 0``).
    """
    n = len(indptr) - 1
    rows = _row_ids(indptr)
    orth = 0.0
    rho_old = rho
    steps = 0
    while steps < max_steps and rho > tol2:
        q[:] = np.bincount(rows, weights=data * p[indices], minlength=n)
        pq = float(np.dot(p, q))
        if not pq > 0.0:
            return steps, rho, orth, rho_old, 1
        alpha = rho / pq
        x += alpha * p
        rq = float(np.dot(r, q))
        r -= alpha * q
        rho_new = float(np.dot(r, r))
        # r_new . r_old = rho - alpha * (r_old . q)
        orth = rho - alpha * rq
        rho_old = rho
        p *= rho_new / rho
        p += r
        rho = rho_new
        steps += 1
    return steps, rho, orth, rho_old, 0
