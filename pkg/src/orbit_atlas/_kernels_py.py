"""Pure numpy implementation of the orbit kernels (fallback backend)."""
import numpy as np


def densify(offsets, rows, cols, vals, n):
    m = len(offsets) - 1
    out = np.zeros((m, n, n), dtype=complex)
    for a in range(m):
        s = slice(offsets[a], offsets[a + 1])
        out[a, rows[s], cols[s]] = vals[s]
    return out


def orbit_matrices(offsets, rows, cols, vals, rho):
    """Fundamental vectors C_a = [B_a, rho] and KKS matrix omega(B_a, B_b).

    Basis elements arrive in concatenated COO form: element ``a`` owns entries
    ``offsets[a]:offsets[a + 1]`` of ``rows``, ``cols``, ``vals``.
    """
    rho = np.ascontiguousarray(rho, dtype=complex)
    basis = densify(offsets, rows, cols, vals, rho.shape[0])
    comm = basis @ rho - rho @ basis
    # omega(x, y) = -tr(i rho [y, x]) = -i tr([x, rho] y)
    omega = (-1j * np.einsum("aij,bji->ab", comm, basis)).real
    return comm, omega
