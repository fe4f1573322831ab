import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.linalg import expm

from orbit_atlas.lie import (GroupSpec, build_basis, cartan, commutator, full_basis, hs_inner,
                             kks_pairing, random_algebra_element, root_x, root_y, su_basis)
from orbit_atlas.states import DensityMatrix


@pytest.mark.parametrize("n", [2, 3, 4])
def test_basis_is_orthogonal_and_antihermitian(n):
    mats = [e.matrix for e in su_basis(n)]
    assert len(mats) == n * n - 1
    for m in mats:
        assert np.allclose(m.conj().T, -m) and abs(np.trace(m)) < 1e-14
    gram = np.array([[hs_inner(a, b) for b in mats] for a in mats])
    off = gram - np.diag(np.diag(gram))
    # Cartan elements iH_{i,i+1} are not mutually orthogonal; roots are
    k = n - 1
    assert np.allclose(off[k:, :], 0) and np.allclose(off[:, k:], 0)
    assert np.allclose(np.diag(gram)[k:], 2)


def test_su2_structure_constants():
    h, x, y = cartan(2, 0, 1), root_x(2, 0, 1), root_y(2, 0, 1)
    assert np.allclose(commutator(h, y), 2 * x)
    assert np.allclose(commutator(h, x), -2 * y)
    assert np.allclose(commutator(y, x), 2 * h)


@pytest.mark.parametrize("n1,n2", [(2, 2), (2, 3), (4, 3)])
def test_group_dimensions(n1, n2):
    full, left = GroupSpec.full(n1, n2), GroupSpec.left(n1, n2)
    assert len(build_basis(full)) == full.algebra_dim == n1 * n1 + n2 * n2 - 2
    assert len(build_basis(left)) == left.algebra_dim == n1 * n1 - 1
    assert len(build_basis(full).cartan_indices) == full.rank


def test_embedded_factors_commute():
    g = GroupSpec.full(2, 3)
    b = build_basis(g)
    left = [e.matrix for e in b.elements if e.label.side == "left"]
    right = [e.matrix for e in b.elements if e.label.side == "right"]
    assert all(np.allclose(commutator(a, c), 0) for a in left for c in right)


def test_basis_is_read_only():
    m = build_basis(GroupSpec.full(2, 2)).elements[0].matrix
    with pytest.raises(ValueError):
        m[0, 0] = 1


def test_shape_mismatch():
    with pytest.raises(ValueError):
        commutator(np.eye(2), np.eye(3))
    with pytest.raises(ValueError):
        su_basis(3, "left", GroupSpec.full(2, 2))


def test_kks_two_qubit_value():
    rho = DensityMatrix(np.diag([0.5, 0.2, 0.2, 0.1]).astype(complex))
    b = {str(e.label): e for e in build_basis(GroupSpec.full(2, 2)).elements}
    w = kks_pairing(b["X_12[left]"], b["Y_12[left]"], rho)
    # row differences (0.5 - 0.2) + (0.2 - 0.1) on the two diagonal blocks
    assert abs(abs(w) - 2 * 0.4) < 1e-12


def _random_rho(n, rng):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    m = a @ a.conj().T
    return m / np.trace(m)


@given(st.integers(0, 2 ** 31))
def test_kks_antisymmetric_and_invariant(seed):
    rng = np.random.default_rng(seed)
    g = GroupSpec.full(2, 3)
    rho = _random_rho(6, rng)
    x, y, z = (random_algebra_element(g, rng) for _ in range(3))
    assert abs(kks_pairing(x, y, rho) + kks_pairing(y, x, rho)) < 1e-10
    u = expm(z)
    moved = u @ rho @ u.conj().T
    ad = lambda a: u @ a @ u.conj().T
    assert abs(kks_pairing(ad(x), ad(y), moved) - kks_pairing(x, y, rho)) < 1e-10


def test_full_basis_spans_su4():
    mats = np.array([e.matrix.ravel() for e in full_basis(4)])
    assert np.linalg.matrix_rank(np.concatenate([mats.real, mats.imag], axis=1)) == 15
