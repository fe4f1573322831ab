from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from orbit_atlas import oracle
from orbit_atlas.lie import GroupSpec, hs_inner
from orbit_atlas.states import CCState, DensityMatrix, cc_to_density

A = F(1, 10)


def rho_cc(rows):
    return cc_to_density(CCState(tuple(tuple(F(x) for x in r) for r in rows)))


G22 = GroupSpec.full(2, 2)


class TestCensus:
    def test_generic(self):
        tags = oracle.root_case_census(rho_cc([["1/2", "1/5"], ["1/5", "1/10"]]), G22)
        assert set(tags.values()) == {"symplectic"}

    def test_identical_columns(self):
        tags = oracle.root_case_census(rho_cc([[A, A], [F(1, 2) - A, F(1, 2) - A]]), G22)
        assert tags == {("left", 0, 1): "symplectic", ("right", 0, 1): "annihilated"}

    def test_double_equal_sums(self):
        tags = oracle.root_case_census(rho_cc([[A, F(1, 2) - A], [F(1, 2) - A, A]]), G22)
        assert set(tags.values()) == {"isotropic"}

    def test_requires_torus_fixed_state(self):
        rho = np.full((4, 4), 0.25, dtype=complex)
        with pytest.raises(ValueError):
            oracle.root_case_census(DensityMatrix(rho), G22)


class TestAlmostComplex:
    def test_pure_product(self):
        assert oracle.almost_complex_check(rho_cc([[1, 0], [0, 0]]), G22)

    def test_maximally_mixed_vacuous(self):
        assert oracle.almost_complex_check(rho_cc([["1/4"] * 2] * 2), G22)

    def test_generic_fails(self):
        assert not oracle.almost_complex_check(rho_cc([["1/2", "1/5"], ["1/5", "1/10"]]), G22)

    def test_pure_product_larger(self):
        rows = [[0] * 3 for _ in range(3)]
        rows[1][2] = 1
        assert oracle.almost_complex_check(rho_cc(rows), GroupSpec.full(3, 3))


@pytest.fixture(scope="module")
def cs():
    return oracle.polar_complex_structure(DensityMatrix(np.diag([0.5, 0.2, 0.2, 0.1]).astype(complex)))


class TestPolar:
    def test_dimension(self, cs):
        # SU(4) / S(U(1) x U(2) x U(1))
        assert cs.dim == 15 - 3 - 2

    def test_j_squared(self, cs):
        assert np.linalg.norm(cs.j @ cs.j + np.eye(cs.dim)) < 1e-8

    def test_j_commutes_with_p(self, cs):
        assert np.linalg.norm(cs.j @ cs.p - cs.p @ cs.j) < 1e-8

    def test_metric(self, cs):
        g = cs.metric
        assert np.allclose(g, g.T, atol=1e-12)
        ev = np.linalg.eigvalsh(g)
        assert ev.min() > 1e-8 * ev.max()
        assert np.allclose(cs.j.T @ g @ cs.j, g, atol=1e-12)

    def test_j_orthogonal_on_matrices(self, cs, rng):
        x, y = (cs.matrix(rng.normal(size=cs.dim)) for _ in range(2))
        jx, jy = cs.apply_j(x), cs.apply_j(y)
        assert abs(hs_inner(jx, jy) - hs_inner(x, y)) < 1e-10

    def test_generic_unitary_orbit(self, rng):
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        u, _ = np.linalg.qr(a)
        rho = u @ np.diag([0.4, 0.3, 0.2, 0.1]) @ u.conj().T
        cs = oracle.polar_complex_structure(DensityMatrix(rho))
        assert cs.dim == 12 and np.linalg.norm(cs.j @ cs.j + np.eye(12)) < 1e-8

    def test_symplectic_k_orbit(self):
        cs = oracle.polar_complex_structure(rho_cc([["1/2", "1/5"], ["1/5", "1/10"]]), G22)
        assert cs.dim == 4 and np.linalg.norm(cs.j @ cs.j + np.eye(4)) < 1e-8

    def test_degenerate_k_orbit(self):
        with pytest.raises(np.linalg.LinAlgError):
            oracle.polar_complex_structure(rho_cc([[A, F(1, 2) - A], [F(1, 2) - A, A]]), G22)


def test_rank_margin_floor():
    noise = np.array([[0, 5e-17], [-5e-17, 0]])
    assert oracle.rank_with_margin(noise, 1e-9, scale=1.0) == (0, False)
    assert oracle.rank_with_margin(noise, 1e-9)[0] == 2


def test_rank_margin_flags_near_threshold():
    assert oracle.rank_with_margin(np.diag([1.0, 2e-9]), 1e-9) == (2, True)


def test_oracle_report_fields():
    rep = oracle.numeric_orbit_report(rho_cc([[A, F(1, 2) - A], [F(1, 2) - A, A]]), G22)
    assert (rep.dim, rep.rank_omega, rep.degeneracy, rep.stabilizer_dim) == (4, 0, 4, 2)
    assert rep.antisymmetry_residual < 1e-12 and not rep.warnings


def test_corpus_deterministic():
    a = oracle.corpus("cq", 3, 2, 5, seed=4)
    b = oracle.corpus("cq", 3, 2, 5, seed=4)
    assert a == b and a != oracle.corpus("cq", 3, 2, 5, seed=5)
    assert oracle.corpus("cc", 2, 3, 3) == oracle.corpus("cc", 2, 3, 3)


@given(st.integers(0, 10 ** 6))
def test_random_cq_blocks_are_states(seed):
    s = oracle.random_cq_state(2, 3, np.random.default_rng(seed))
    assert s.exact and sum(s.p) == 1


def test_verify_reports_diff(monkeypatch):
    monkeypatch.setattr(oracle.classify, "cc_dim", lambda ps, n1, n2: 99)
    rec = oracle.verify_formulas(oracle.reference_families()[0].state)
    assert not rec.ok and rec.diff()["dim"] == (99, 4)


def test_kahler_orbit_outside_two_families():
    # each root moves only one pair of unequal weights, so ad_rho keeps the
    # tangent space; distinct row and column sums make the orbit symplectic
    s = CCState(((F(2, 7), F(1, 7)), (F(2, 7), F(2, 7))))
    rep = oracle.numeric_orbit_report(cc_to_density(s), G22)
    assert rep.degeneracy == 0 and rep.almost_complex
    assert not oracle.classify.cc_is_kahler(s)
    cs = oracle.polar_complex_structure(cc_to_density(s), G22)
    assert np.linalg.norm(cs.j @ cs.j + np.eye(cs.dim)) < 1e-8
