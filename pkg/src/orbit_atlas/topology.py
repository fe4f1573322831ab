"""Euler characteristics of LU orbits (Hopf-Samelson) and stabilizer structure.

Partition summaries are consumed duck-typed (``row_eq_classes`` etc.) so this
module does not depend on :mod:`orbit_atlas.classify`.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial, prod

import numpy as np

from .lie import GroupSpec, Variant
from .states import CCState, CQState, DensityMatrix, PureSeparableSpec

DIAG_TOL = 1e-10


class BookkeepingError(ArithmeticError):
    """Combinatorial data that cannot come from a valid orbit."""


@dataclass(frozen=True)
class StabilizerDescriptor:
    """Stabilizer of rho as (product of SU(m_k)) x torus of rank ``torus_rank``."""

    su_factors: tuple
    torus_rank: int

    @property
    def dim(self) -> int:
        return sum(m * m - 1 for m in self.su_factors) + self.torus_rank

    @property
    def weyl_order(self) -> int:
        return prod(factorial(m) for m in self.su_factors)

    def as_dict(self) -> dict:
        return {"su_factors": list(self.su_factors), "torus_rank": self.torus_rank,
                "dim": self.dim, "weyl_order": self.weyl_order}


def weyl_order_su(n: int) -> int:
    """|W(SU(n))| = n!."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return factorial(n)


def weyl_order_group(group: GroupSpec) -> int:
    w = weyl_order_su(group.n1)
    if group.variant is Variant.FULL_LU:
        w *= weyl_order_su(group.n2)
    return w


def _ratio(num: int, den: int) -> int:
    q, r = divmod(num, den)
    if r:
        raise BookkeepingError(f"Euler characteristic {num}/{den} is not an integer")
    return q


def euler_cc(s: CCState, ps) -> int:
    """N1!/prod |I_R|! * N2!/prod |J_C|! over classes of identical rows/columns."""
    left = _ratio(factorial(s.n1), prod(factorial(len(c)) for c in ps.row_eq_classes))
    right = _ratio(factorial(s.n2), prod(factorial(len(c)) for c in ps.col_eq_classes))
    return left * right


def euler_cq(s: CQState, ps) -> int:
    """N1!/prod |I_sigma|! over classes of equal p_i rho_i."""
    return _ratio(factorial(s.n1), prod(factorial(len(c)) for c in ps.block_classes))


def euler_pure_separable(spec: PureSeparableSpec) -> int:
    return prod(spec.dims)


def pure_separable_stabilizer_weyl(spec: PureSeparableSpec) -> int:
    """|W| of the stabilizer prod S(U(1) x U(N_i - 1)) of a product pure state."""
    return prod(factorial(d - 1) for d in spec.dims)


def stabilizer_structure(state, group: GroupSpec, ps, orbit_dim: int | None = None) -> StabilizerDescriptor:
    """SU factors from the equality classes, torus from rank counting.

    The stabilizer contains a maximal torus of K, so its rank equals rank(K);
    each SU(m) factor accounts for m - 1 of it and the rest is the torus.
    When ``orbit_dim`` is given the dimension bookkeeping
    dim K = dim stabilizer + dim orbit is enforced.
    """
    if group.variant is Variant.FULL_LU:
        if not isinstance(state, CCState):
            raise TypeError("SU(N1) x SU(N2) stabilizers are described for CC states only")
        classes = list(ps.row_eq_classes) + list(ps.col_eq_classes)
    else:
        classes = list(ps.block_classes)
    factors = tuple(sorted((len(c) for c in classes if len(c) >= 2), reverse=True))
    torus = group.rank - sum(m - 1 for m in factors)
    if torus < 0:
        raise BookkeepingError(f"SU factors {factors} exceed the rank of {group}")
    desc = StabilizerDescriptor(factors, torus)
    if orbit_dim is not None and desc.dim + orbit_dim != group.algebra_dim:
        raise BookkeepingError(
            f"stabilizer dim {desc.dim} + orbit dim {orbit_dim} != group dim {group.algebra_dim}")
    return desc


def euler_hopf_samelson(group: GroupSpec, stab: StabilizerDescriptor) -> int:
    """|W_K| / |W_{K_rho}|, valid when the stabilizer contains a maximal torus."""
    return _ratio(weyl_order_group(group), stab.weyl_order)


def has_nonvanishing_euler(state, group: GroupSpec, tol: float = DIAG_TOL) -> bool:
    """Whether the K-orbit has nonzero Euler characteristic.

    Density matrices are tested in the declared product basis: diagonal (CC
    form) for the full LU group, block diagonal (CQ form) for SU(N1) x I.  A
    declared CQ state under the full LU group is LU-equivalent to a CC state
    exactly when its blocks of positive weight commute.
    """
    if isinstance(state, CCState):
        return True
    if isinstance(state, CQState):
        if group.variant is Variant.LEFT_ONLY:
            return True
        return blocks_commute(state, tol)
    if not isinstance(state, DensityMatrix):
        raise TypeError(f"unsupported state type {type(state).__name__}")
    m = state.entries
    n1, n2 = group.n1, group.n2
    if m.shape != (n1 * n2, n1 * n2):
        raise ValueError(f"matrix shape {m.shape} does not match {n1}x{n2}")
    if group.variant is Variant.FULL_LU:
        off = m - np.diag(np.diag(m))
    else:
        mask = np.kron(np.eye(n1), np.ones((n2, n2)))
        off = m * (1 - mask)
    return bool(np.max(np.abs(off), initial=0.0) <= tol)


def blocks_commute(s: CQState, tol: float = DIAG_TOL) -> bool:
    blocks = [s.block_array(i) for i in range(s.n1) if s.p[i] > 0]
    return all(np.max(np.abs(a @ b - b @ a)) <= tol
               for k, a in enumerate(blocks) for b in blocks[k + 1:])


def euler_of_density(rho: DensityMatrix, group: GroupSpec, tol: float = 1e-9) -> int:
    """Euler characteristic for a matrix in the declared product basis (0 off CC/CQ form)."""
    from .classify import classify_state

    if not has_nonvanishing_euler(rho, group):
        return 0
    n1, n2 = group.n1, group.n2
    m = rho.entries
    blocks, weights = [], []
    for i in range(n1):
        b = m[i * n2:(i + 1) * n2, i * n2:(i + 1) * n2]
        w = float(np.trace(b).real)
        weights.append(w)
        blocks.append(b / w if w > 0 else np.eye(n2) / n2)
    cq = CQState(tuple(weights), tuple(blocks))
    return classify_state(cq, group, tol).report.euler

