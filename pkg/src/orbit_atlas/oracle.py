"""Numerical oracle: orbit data by dense linear algebra on the embedded generators.

Nothing here uses the combinatorial formulas of :mod:`orbit_atlas.classify`;
ranks come from singular values of the fundamental-vector matrix and of the
KKS pairing matrix, so the two routes can be compared field by field.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.linalg import polar

from . import classify, kernels
from .lie import GroupSpec, Variant, build_basis, full_basis
from .states import (CCState, CQState, DensityMatrix, GaussianRational, cc_as_cq, cc_to_density,
                     cq_as_cc, cq_to_density)

DEFAULT_TOL = 1e-9
ANTISYM_TOL = 1e-10
CONDITION_FACTOR = 10.0


def rank_with_margin(mat: np.ndarray, tol: float = DEFAULT_TOL, scale: float = 0.0):
    """Numerical rank with threshold ``tol * max(sigma_max, scale)``.

    ``scale`` is the size the matrix would have if it were not degenerate; it
    keeps a matrix of pure round-off from being read as full rank.  Returns
    ``(rank, ill_conditioned)``; the flag is set when some singular value lies
    within a factor 10 of the threshold.
    """
    if mat.size == 0:
        return 0, False
    s = np.linalg.svd(mat, compute_uv=False)
    if max(s[0], scale) == 0:
        return 0, False
    thr = tol * max(s[0], scale)
    near = (s > thr / CONDITION_FACTOR) & (s < thr * CONDITION_FACTOR)
    return int(np.count_nonzero(s > thr)), bool(near.any())


@lru_cache(maxsize=64)
def _coo(group: GroupSpec):
    return kernels.to_coo(build_basis(group).stack())


def _realify(mats: np.ndarray) -> np.ndarray:
    """Rows of real coordinates (real parts, then imaginary parts)."""
    flat = mats.reshape(len(mats), -1)
    return np.concatenate([flat.real, flat.imag], axis=1)


def orbit_matrices(rho: DensityMatrix, group: GroupSpec):
    """Fundamental vectors [B_a, rho] and KKS matrix over the group's basis."""
    r = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    if r.shape != (group.n1 * group.n2,) * 2:
        raise ValueError(f"state of shape {r.shape} does not match {group}")
    return kernels.orbit_matrices(*_coo(group), r)


@dataclass(frozen=True)
class OracleReport:
    dim: int
    rank_omega: int
    degeneracy: int
    stabilizer_dim: int
    almost_complex: bool
    root_census: dict | None
    tol: float
    antisymmetry_residual: float
    warnings: tuple = ()


def numeric_orbit_report(rho: DensityMatrix, group: GroupSpec, tol: float = DEFAULT_TOL) -> OracleReport:
    comm, omega = orbit_matrices(rho, group)
    scale = _scale(rho)
    dim, ill1 = rank_with_margin(_realify(comm), tol, scale)
    rank, ill2 = rank_with_margin(omega, tol, scale)
    warnings = []
    if ill1 or ill2:
        warnings.append("ill-conditioned rank decision: singular value within a factor 10 of threshold")
    asym = float(np.max(np.abs(omega + omega.T), initial=0.0))
    if asym > ANTISYM_TOL:
        warnings.append(f"KKS matrix antisymmetry residual {asym:.2e}")
    try:
        census = root_case_census(rho, group, tol)
    except ValueError:
        census = None
    return OracleReport(dim=dim, rank_omega=rank, degeneracy=dim - rank,
                        stabilizer_dim=group.algebra_dim - dim,
                        almost_complex=_almost_complex(rho, comm, tol),
                        root_census=census, tol=tol, antisymmetry_residual=asym,
                        warnings=tuple(warnings))


def _embed_root(n1, n2, side, a, b):
    n = n1 if side == "left" else n2
    e = np.zeros((n, n))
    e[a, b] = 1
    return np.kron(e, np.eye(n2)) if side == "left" else np.kron(np.eye(n1), e)


def positive_roots(group: GroupSpec):
    sides = [("left", group.n1)]
    if group.variant is Variant.FULL_LU:
        sides.append(("right", group.n2))
    return [(side, i, j) for side, n in sides for i in range(n) for j in range(i + 1, n)]


def root_case_census(rho: DensityMatrix, group: GroupSpec, tol: float = DEFAULT_TOL) -> dict:
    """Tag every positive root (side, i, j) as annihilated / isotropic / symplectic.

    Requires rho to commute with the Cartan subalgebra of the group (diagonal
    for the full LU group, block diagonal for SU(N1) x I).
    """
    r = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    basis = build_basis(group)
    for k in basis.cartan_indices:
        h = basis.elements[k].matrix
        if np.max(np.abs(h @ r - r @ h)) > tol:
            raise ValueError("state does not commute with the maximal torus")
    n1, n2 = group.n1, group.n2
    tags = {}
    for side, i, j in positive_roots(group):
        e_pos = _embed_root(n1, n2, side, i, j)
        e_neg = e_pos.T
        h = _embed_root(n1, n2, side, i, i) - _embed_root(n1, n2, side, j, j)
        c_pos = np.max(np.abs(e_pos @ r - r @ e_pos))
        c_neg = np.max(np.abs(e_neg @ r - r @ e_neg))
        if c_pos <= tol and c_neg <= tol:
            tags[(side, i, j)] = "annihilated"
        elif abs(np.trace(r @ h)) <= tol:
            tags[(side, i, j)] = "isotropic"
        else:
            tags[(side, i, j)] = "symplectic"
    return tags


def _scale(rho) -> float:
    r = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    return float(np.linalg.norm(r, 2))


def _almost_complex(rho, comm, tol) -> bool:
    r = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    _, s, vh = np.linalg.svd(_realify(comm), full_matrices=False)
    if s.size == 0:
        return True
    q = vh[s > tol * max(s[0], _scale(rho))]   # orthonormal rows spanning the tangent space
    images = 1j * (r @ comm - comm @ r)        # [i rho, v] for every tangent vector
    w = _realify(images)
    resid = w - (w @ q.T) @ q
    # round-off images of near-zero tangent vectors are judged on the global scale
    floor = tol * max(np.linalg.norm(w, axis=1).max(initial=0.0), _scale(rho))
    return bool(np.all(np.linalg.norm(resid, axis=1) <= floor))


def almost_complex_check(rho: DensityMatrix, group: GroupSpec, tol: float = DEFAULT_TOL) -> bool:
    """Whether [i rho, T] lies in T for the tangent space T of the K-orbit."""
    comm, _ = orbit_matrices(rho, group)
    return _almost_complex(rho, comm, tol)


# --- polar complex structure ---------------------------------------------------

@dataclass(frozen=True, eq=False)
class ComplexStructure:
    """Polar data of ad_rho on the tangent space, in orthonormal coordinates.

    ``frame`` holds anti-Hermitian matrices forming an orthonormal basis (for
    the invariant inner product) of the complement of the stabilizer
    algebra.  ``omega`` is the KKS form, ``j`` and ``p`` its polar factors
    (omega = j p) and ``metric`` the induced compatible metric.
    """

    frame: np.ndarray
    omega: np.ndarray
    j: np.ndarray
    p: np.ndarray
    metric: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.frame)

    def coords(self, x: np.ndarray) -> np.ndarray:
        return -np.einsum("aij,ji->a", self.frame, x).real

    def matrix(self, c: np.ndarray) -> np.ndarray:
        return np.tensordot(c, self.frame, axes=1)

    def apply_j(self, x: np.ndarray) -> np.ndarray:
        return self.matrix(self.j @ self.coords(x))


def polar_complex_structure(rho: DensityMatrix, group: GroupSpec | None = None,
                            tol: float = DEFAULT_TOL) -> ComplexStructure:
    """Polar decomposition of ad_rho = [i rho, .] restricted to the tangent space.

    ``group=None`` uses the full SU(N) orbit of rho.  For a K-orbit the KKS
    form is compressed to the K tangent space, which is only possible when
    the orbit is symplectic.
    """
    r = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    n = r.shape[0]
    if group is None:
        basis = np.array([e.matrix for e in full_basis(n)])
    else:
        basis = build_basis(group).stack()
    gram = -np.einsum("aij,bji->ab", basis, basis).real
    chol = np.linalg.cholesky(gram)
    ortho = np.tensordot(np.linalg.inv(chol), basis, axes=1)
    comm = ortho @ r - r @ ortho
    # left singular vectors span the complement of the stabilizer, in coefficients
    u, s, _ = np.linalg.svd(_realify(comm), full_matrices=False)
    keep = s > tol * max(s[0], _scale(r))
    if not keep.any():
        raise np.linalg.LinAlgError("orbit is a point: tangent space is trivial")
    q = u[:, keep].T
    frame = np.tensordot(q, ortho, axes=1)
    fcomm = frame @ r - r @ frame
    # omega(x, y) = -i tr([x, rho] y)
    omega = (-1j * np.einsum("aij,bji->ab", fcomm, frame)).real
    sv = np.linalg.svd(omega, compute_uv=False)
    if sv[-1] <= tol * sv[0]:
        raise np.linalg.LinAlgError("ad_rho is singular on the tangent space (orbit not symplectic)")
    j, p = polar(omega, side="right")
    metric = j.T @ omega
    return ComplexStructure(frame=frame, omega=omega, j=j, p=p, metric=metric)


# --- formula vs oracle ---------------------------------------------------------

FIELDS = ("dim", "rank", "degeneracy", "stabilizer_dim", "symplectic")


@dataclass(frozen=True)
class Agreement:
    formula: dict
    oracle: dict
    matches: dict
    warnings: tuple = ()

    @property
    def ok(self) -> bool:
        return all(self.matches.values())

    def diff(self) -> dict:
        return {k: (self.formula[k], self.oracle[k]) for k, ok in self.matches.items() if not ok}


def _density(state):
    return cc_to_density(state) if isinstance(state, CCState) else cq_to_density(state)


def symplectic_conditions(state, group: GroupSpec, tol: float = DEFAULT_TOL) -> bool:
    """Combinatorial symplecticity, decided on the raw weights."""
    if isinstance(state, CCState) and group.variant is Variant.LEFT_ONLY:
        state = cc_as_cq(state)
    if isinstance(state, CCState):
        return classify.cc_symplectic_conditions(state, tol)
    if group.variant is Variant.FULL_LU:
        cc = cq_as_cc(state) if state.blocks_diagonal() else classify.commuting_blocks_as_cc(state, tol)
        if cc is None:
            return False
        return classify.cc_symplectic_conditions(cc, tol)
    return classify.cq_symplectic_conditions(state, tol)


def verify_formulas(state, group: GroupSpec | None = None, tol: float = DEFAULT_TOL) -> Agreement:
    """Compare the combinatorial classification with the oracle, field by field."""
    group = group or classify.default_group(state)
    notes = ()
    try:
        cls = classify.classify_state(state, group, tol, check_bookkeeping=False)
        stab_dim = cls.stabilizer.dim if cls.stabilizer is not None else group.algebra_dim - cls.report.dim
        formula = {"dim": cls.report.dim, "rank": cls.report.rank, "degeneracy": cls.report.degeneracy,
                   "stabilizer_dim": stab_dim}
        notes = cls.report.warnings
    except (ValueError, ArithmeticError) as exc:
        # an inconsistent formula is a mismatch, not a crash
        formula = dict.fromkeys(("dim", "rank", "degeneracy", "stabilizer_dim"))
        notes = (f"formula side failed: {exc}",)
    formula["symplectic"] = symplectic_conditions(state, group, tol)
    orc = numeric_orbit_report(_density(state), group, tol)
    oracle = {"dim": orc.dim, "rank": orc.rank_omega, "degeneracy": orc.degeneracy,
              "stabilizer_dim": orc.stabilizer_dim, "symplectic": orc.degeneracy == 0}
    matches = {k: formula[k] == oracle[k] for k in FIELDS}
    return Agreement(formula, oracle, matches, notes + orc.warnings)


# --- corpus --------------------------------------------------------------------

def _rng(seed: int, kind: str, n1: int, n2: int) -> np.random.Generator:
    return np.random.default_rng([seed, {"cc": 0, "cq": 1}[kind], n1, n2])


def random_cc_state(n1: int, n2: int, rng: np.random.Generator) -> CCState:
    """Integer numerators in [1, 100] over their common sum."""
    nums = rng.integers(1, 101, size=(n1, n2))
    total = int(nums.sum())
    return CCState(tuple(tuple(Fraction(int(x), total) for x in row) for row in nums))


def random_density_block(n: int, rng: np.random.Generator):
    """Exact rational density matrix A A^dagger / tr, A with small Gaussian-integer entries."""
    while True:
        re = rng.integers(-3, 4, size=(n, n))
        im = rng.integers(-3, 4, size=(n, n))
        a = [[(int(re[r, c]), int(im[r, c])) for c in range(n)] for r in range(n)]
        m = [[(sum(a[r][k][0] * a[c][k][0] + a[r][k][1] * a[c][k][1] for k in range(n)),
               sum(a[r][k][1] * a[c][k][0] - a[r][k][0] * a[c][k][1] for k in range(n)))
              for c in range(n)] for r in range(n)]
        tr = sum(m[k][k][0] for k in range(n))
        if tr:
            return tuple(tuple(GaussianRational(Fraction(x, tr), Fraction(y, tr)) for x, y in row)
                         for row in m)


def random_cq_state(n1: int, n2: int, rng: np.random.Generator) -> CQState:
    nums = rng.integers(1, 101, size=n1)
    total = int(nums.sum())
    p = tuple(Fraction(int(x), total) for x in nums)
    return CQState(p, tuple(random_density_block(n2, rng) for _ in range(n1)))


def corpus(kind: str, n1: int, n2: int, samples: int, seed: int = 0) -> list:
    """Deterministic random states; each (kind, size) class has its own stream."""
    rng = _rng(seed, kind, n1, n2)
    make = random_cc_state if kind == "cc" else random_cq_state
    return [make(n1, n2, rng) for _ in range(samples)]


@dataclass(frozen=True)
class ReferenceCase:
    family: str
    name: str
    state: CCState
    expected: tuple   # (dim, rank, degeneracy)


def _cc(rows):
    return CCState(tuple(tuple(Fraction(v) for v in r) for r in rows))


def reference_families(alpha=Fraction(1, 10), beta=Fraction(3, 10)) -> list:
    """The four two-qubit CC families with their (dim, rank, D)."""
    a, b, h = Fraction(alpha), Fraction(beta), Fraction(1, 2)
    return [
        ReferenceCase("distinct sums", "generic", _cc([[h, Fraction(1, 5)], [Fraction(1, 5), Fraction(1, 10)]]), (4, 4, 0)),
        ReferenceCase("equal column sums", "identical columns", _cc([[a, a], [h - a, h - a]]), (2, 2, 0)),
        ReferenceCase("equal column sums", "distinct columns", _cc([[a, h - b], [h - a, b]]), (4, 2, 2)),
        ReferenceCase("equal row sums", "identical rows", _cc([[a, h - a], [a, h - a]]), (2, 2, 0)),
        ReferenceCase("equal row sums", "distinct rows", _cc([[a, h - a], [h - b, b]]), (4, 2, 2)),
        ReferenceCase("equal row and column sums", "alpha != 1/4", _cc([[a, h - a], [h - a, a]]), (4, 0, 4)),
        ReferenceCase("equal row and column sums", "alpha = 1/4", _cc([[Fraction(1, 4)] * 2] * 2), (0, 0, 0)),
    ]
