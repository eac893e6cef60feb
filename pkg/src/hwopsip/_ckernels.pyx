# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sparse kernels: CSR mat-vec and a fused conjugate-gradient loop."""
from libc.stdint cimport int64_t


cdef void _matvec(const int64_t[::1] indptr, const int64_t[::1] indices,
                  const double[::1] data, const double[::1] x,
                  double[::1] y) noexcept nogil:
    cdef Py_ssize_t i, k, n = indptr.shape[0] - 1
    cdef double s
    for i in range(n):
        s = 0.0
        for k in range(indptr[i], indptr[i + 1]):
            s += data[k] * x[indices[k]]
        y[i] = s


def csr_matvec(const int64_t[::1] indptr, const int64_t[::1] indices,
               const double[::1] data, const double[::1] x, double[::1] y):
    """``y[:] = A @ x`` for a CSR matrix."""
    with nogil:
        _matvec(indptr, indices, data, x, y)


def cg_chunk(const int64_t[::1] indptr, const int64_t[::1] indices,
             const double[::1] data, double[::1] x, double[::1] r,
             double[::1] p, double[::1] q, double rho, double tol2,
             long max_steps):
    """Run up to ``max_steps`` CG iterations in place.

    Returns ``(steps, rho, orth, rho_old, status)``; see the numpy fallback.
    """
    cdef Py_ssize_t i, n = x.shape[0]
    cdef long steps = 0
    cdef int status = 0
    cdef double pq, alpha, rq, rho_new, beta, orth = 0.0, rho_old = rho
    with nogil:
        while steps < max_steps and rho > tol2:
            _matvec(indptr, indices, data, p, q)
            pq = 0.0
            for i in range(n):
                pq += p[i] * q[i]
            if not pq > 0.0:
                status = 1
                break
            alpha = rho / pq
            rq = 0.0
            rho_new = 0.0
            for i in range(n):
                x[i] += alpha * p[i]
                rq += r[i] * q[i]
                r[i] -= alpha * q[i]
                rho_new += r[i] * r[i]
            orth = rho - alpha * rq
            rho_old = rho
            beta = rho_new / rho
            for i in range(n):
                p[i] = r[i] + beta * p[i]
            rho = rho_new
            steps += 1
    return steps, rho, orth, rho_old, status
