# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled decoder metric kernel.

Semantics match the NumPy fallback in ``_kernels_py``: scan the candidate
stack in order, keep the first index achieving the minimum metric.
"""


def metric_scan(const double complex[:, :, ::1] stack,
                const double complex[:, ::1] r_prev,
                const double complex[:, ::1] r_t,
                double inv_a):
    """argmin_m || r_t - inv_a * stack[m] @ r_prev ||_F^2 over the stack."""
    cdef Py_ssize_t count = stack.shape[0]
    cdef Py_ssize_t n = stack.shape[1]
    cdef Py_ssize_t nr = r_prev.shape[1]
    cdef Py_ssize_t m, i, j, r
    cdef double complex acc, d
    cdef double metric
    cdef double best_metric = -1.0
    cdef Py_ssize_t best = 0

    if stack.shape[2] != r_prev.shape[0] or r_t.shape[0] != n or r_t.shape[1] != nr:
        raise ValueError("inconsistent operand shapes")

    with nogil:
        for m in range(count):
            metric = 0.0
            for r in range(nr):
                for i in range(n):
                    acc = 0
                    for j in range(n):
                        acc = acc + stack[m, i, j] * r_prev[j, r]
                    d = r_t[i, r] - inv_a * acc
                    metric += d.real * d.real + d.imag * d.imag
            if best_metric < 0.0 or metric < best_metric:
                best_metric = metric
                best = m
    return best, best_metric
