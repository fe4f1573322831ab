# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled orbit kernels exploiting the sparsity of the root-basis generators."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def orbit_matrices(const cnp.int64_t[::1] offsets, const cnp.int64_t[::1] rows,
                   const cnp.int64_t[::1] cols, const double complex[::1] vals,
                   rho_in):
    """Fundamental vectors C_a = [B_a, rho] and KKS matrix omega(B_a, B_b).

    Same contract as the numpy fallback; cost is O(nnz * n) for the
    commutators and O(m * nnz) for the pairing matrix.
    """
    cdef const double complex[:, ::1] rho = np.ascontiguousarray(rho_in, dtype=complex)
    cdef Py_ssize_t n = rho.shape[0]
    cdef Py_ssize_t m = offsets.shape[0] - 1
    comm_arr = np.zeros((m, n, n), dtype=complex)
    omega_arr = np.zeros((m, m), dtype=float)
    cdef double complex[:, :, ::1] comm = comm_arr
    cdef double[:, ::1] omega = omega_arr
    cdef Py_ssize_t a, b, k, t, r, c
    cdef double complex v, acc
    with nogil:
        for a in range(m):
            for k in range(offsets[a], offsets[a + 1]):
                r = rows[k]
                c = cols[k]
                v = vals[k]
                # (B rho)[r, t] += v rho[c, t];  (rho B)[t, c] += rho[t, r] v
                for t in range(n):
                    comm[a, r, t] += v * rho[c, t]
                    comm[a, t, c] -= rho[t, r] * v
        for a in range(m):
            for b in range(m):
                acc = 0
                # tr(C_a B_b) = sum over entries (r, c, v) of B_b of C_a[c, r] v
                for k in range(offsets[b], offsets[b + 1]):
                    acc = acc + comm[a, cols[k], rows[k]] * vals[k]
                # -i * acc, real part
                omega[a, b] = acc.imag
    return comm_arr, omega_arr
