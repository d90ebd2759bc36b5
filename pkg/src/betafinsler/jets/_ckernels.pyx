# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled jet kernels: truncated product and univariate composition."""
import numpy as np
cimport numpy as cnp


cdef void _mul(const double[::1] a, const double[::1] b, const Py_ssize_t[::1] I,
               const Py_ssize_t[::1] J, const Py_ssize_t[::1] K, double[::1] out) noexcept nogil:
    cdef Py_ssize_t t, n = I.shape[0]
    for t in range(out.shape[0]):
        out[t] = 0.0
    for t in range(n):
        out[K[t]] += a[I[t]] * b[J[t]]


def mul(const double[::1] a, const double[::1] b, const Py_ssize_t[::1] I,
        const Py_ssize_t[::1] J, const Py_ssize_t[::1] K):
    out = np.empty(a.shape[0], dtype=np.float64)
    cdef double[::1] o = out
    _mul(a, b, I, J, K, o)
    return out


def compose(const double[::1] a, const double[::1] coeffs, const Py_ssize_t[::1] I,
            const Py_ssize_t[::1] J, const Py_ssize_t[::1] K):
    cdef Py_ssize_t size = a.shape[0], d = coeffs.shape[0], k
    h_arr = np.array(a, dtype=np.float64)
    r_arr = np.zeros(size, dtype=np.float64)
    tmp_arr = np.empty(size, dtype=np.float64)
    cdef double[::1] h = h_arr
    cdef double[::1] r = r_arr
    cdef double[::1] tmp = tmp_arr
    h[0] = 0.0
    r[0] = coeffs[d - 1]
    with nogil:
        for k in range(d - 2, -1, -1):
            _mul(r, h, I, J, K, tmp)
            r[:] = tmp
            r[0] += coeffs[k]
    return r_arr
