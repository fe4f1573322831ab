"""Backend selection for the orbit kernels.

The compiled extension is used when it was built; set ``ORBIT_ATLAS_PURE=1``
to force the numpy fallback.
"""
import os

import numpy as np

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

if _compiled is not None and not os.environ.get("ORBIT_ATLAS_PURE"):
    BACKEND = "cython"
    orbit_matrices = _compiled.orbit_matrices
else:
    BACKEND = "python"
    orbit_matrices = _kernels_py.orbit_matrices


def backends():
    """Mapping of every importable backend name to its ``orbit_matrices``."""
    out = {"python": _kernels_py.orbit_matrices}
    if _compiled is not None:
        out["cython"] = _compiled.orbit_matrices
    return out


def to_coo(matrices):
    """Concatenated COO arrays (offsets, rows, cols, vals) for a stack of matrices."""
    offsets = [0]
    rows, cols, vals = [], [], []
    for mat in matrices:
        r, c = np.nonzero(mat)
        rows.append(r)
        cols.append(c)
        vals.append(mat[r, c])
        offsets.append(offsets[-1] + len(r))
    cat = lambda xs, dt: np.ascontiguousarray(np.concatenate(xs) if xs else np.empty(0), dtype=dt)
    return (np.asarray(offsets, dtype=np.int64), cat(rows, np.int64), cat(cols, np.int64),
            cat(vals, complex))
