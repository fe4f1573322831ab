from fractions import Fraction as F
from math import factorial

import numpy as np
import pytest
from hypothesis import given

from orbit_atlas import classify as C
from orbit_atlas import topology as T
from orbit_atlas.lie import GroupSpec
from orbit_atlas.states import CCState, CQState, DensityMatrix, PureSeparableSpec, cc_as_cq

from strategies import cc_states


def uniform(n1, n2):
    return CCState(tuple(tuple(F(1, n1 * n2) for _ in range(n2)) for _ in range(n1)))


def test_maximally_mixed_point():
    assert C.classify_state(uniform(3, 2)).report.euler == 1


@pytest.mark.parametrize("n1,n2", [(2, 2), (3, 3), (2, 4)])
def test_generic_cc(n1, n2):
    nums = np.arange(1, n1 * n2 + 1) ** 2
    s = CCState(tuple(tuple(F(int(nums[i * n2 + j]), int(nums.sum())) for j in range(n2)) for i in range(n1)))
    cls = C.classify_state(s)
    assert cls.report.euler == factorial(n1) * factorial(n2)
    assert cls.stabilizer.su_factors == () and cls.stabilizer.torus_rank == n1 + n2 - 2


@given(cc_states())
def test_hopf_samelson_matches_formula(s):
    cls = C.classify_state(s)
    assert cls.report.euler == T.euler_hopf_samelson(cls.group, cls.stabilizer)


@given(cc_states())
def test_cc_factorizes_into_cq_and_qc(s):
    left = C.classify_state(cc_as_cq(s), GroupSpec.left(s.n1, s.n2)).report.euler
    right = C.classify_state(cc_as_cq(s.transpose()), GroupSpec.left(s.n2, s.n1)).report.euler
    assert C.classify_state(s).report.euler == left * right


@given(cc_states())
def test_stabilizer_bookkeeping(s):
    cls = C.classify_state(s)
    assert cls.stabilizer.dim + cls.report.dim == cls.group.algebra_dim


@pytest.mark.parametrize("dims,chi", [((2, 2, 2), 8), ((3, 4), 12), ((5,), 5)])
def test_pure_separable(dims, chi):
    spec = PureSeparableSpec(dims)
    assert T.euler_pure_separable(spec) == chi
    # |W(prod SU(N_i))| / |W(stabilizer)| over the factors
    w = np.prod([factorial(d) for d in dims]) // T.pure_separable_stabilizer_weyl(spec)
    assert w == chi


def test_nonintegral_ratio_raises():
    with pytest.raises(T.BookkeepingError):
        T.euler_hopf_samelson(GroupSpec.full(2, 2), T.StabilizerDescriptor((3,), 0))


def test_zero_off_cc_form():
    v = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    rho = np.kron(np.diag([0.6, 0.4]), np.eye(2) / 2) + 0j
    rho[0, 2] = rho[2, 0] = 0.1
    assert not T.has_nonvanishing_euler(DensityMatrix(rho), GroupSpec.full(2, 2))
    assert T.euler_of_density(DensityMatrix(rho), GroupSpec.full(2, 2)) == 0
    diag = np.kron(np.diag([0.6, 0.4]), v @ np.diag([0.7, 0.3]) @ v.T) + 0j
    assert T.has_nonvanishing_euler(DensityMatrix(diag), GroupSpec.left(2, 2))
    assert T.euler_of_density(DensityMatrix(diag), GroupSpec.left(2, 2)) == 2


def test_commuting_blocks_have_euler():
    s = CQState((0.5, 0.5), (np.diag([0.7, 0.3]), np.diag([0.2, 0.8])))
    assert T.has_nonvanishing_euler(s, GroupSpec.full(2, 2))
    assert C.classify_state(s, GroupSpec.full(2, 2)).report.euler == 4
