import numpy as np
import pytest

from orbit_atlas import _kernels_py, kernels
from orbit_atlas.lie import GroupSpec, build_basis, kks_pairing


def _rho(n, rng):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    m = a @ a.conj().T
    return m / np.trace(m)


def test_backend_selected():
    assert kernels.BACKEND in kernels.backends()


@pytest.mark.parametrize("n1,n2,variant", [(2, 2, "full"), (3, 4, "full"), (4, 3, "left")])
def test_backends_agree(rng, n1, n2, variant):
    g = getattr(GroupSpec, variant)(n1, n2)
    coo = kernels.to_coo(build_basis(g).stack())
    rho = _rho(n1 * n2, rng)
    ref_c, ref_w = _kernels_py.orbit_matrices(*coo, rho)
    for name, fn in kernels.backends().items():
        c, w = fn(*coo, rho)
        np.testing.assert_allclose(c, ref_c, atol=1e-14, err_msg=name)
        np.testing.assert_allclose(w, ref_w, atol=1e-14, err_msg=name)


def test_omega_matches_pairing(rng):
    g = GroupSpec.full(2, 3)
    basis = build_basis(g).elements
    rho = _rho(6, rng)
    comm, omega = kernels.orbit_matrices(*kernels.to_coo(build_basis(g).stack()), rho)
    for a in (0, 3, 7):
        np.testing.assert_allclose(comm[a], basis[a].matrix @ rho - rho @ basis[a].matrix, atol=1e-14)
        for b in (1, 4, 9):
            assert abs(omega[a, b] - kks_pairing(basis[a], basis[b], rho)) < 1e-13


def test_coo_roundtrip(rng):
    mats = build_basis(GroupSpec.full(3, 2)).stack()
    coo = kernels.to_coo(mats)
    np.testing.assert_array_equal(_kernels_py.densify(*coo, 6), mats)


def test_pure_fallback_env():
    import os
    import subprocess
    import sys
    env = dict(os.environ, ORBIT_ATLAS_PURE="1")
    out = subprocess.run([sys.executable, "-c", "from orbit_atlas import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
