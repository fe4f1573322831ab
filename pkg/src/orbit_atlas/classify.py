"""Combinatorial classification of LU orbits through CC and CQ states.

Everything here is decided from equality partitions of the weight data:
rows/columns (and their sums) for CC states, weights p_i and weighted blocks
p_i * rho_i for CQ states.  Float input is partitioned by gap clustering with
tolerance ``tol``; exact input by equality.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

import numpy as np

from . import topology
from .lie import GroupSpec, Variant
from .states import CCState, CQState, PureSeparableSpec, StateError, cc_as_cq, cq_as_cc

DEFAULT_TOL = 1e-9
AMBIGUITY_FACTOR = 10.0


# --- clustering ----------------------------------------------------------------

def _canonical(classes):
    return tuple(sorted((tuple(sorted(c)) for c in classes), key=lambda c: c[0]))


def cluster_scalars(values, tol: float = DEFAULT_TOL):
    """Partition indices of ``values`` into equality classes.

    Exact values (Fractions) are grouped by equality.  Floats are sorted and
    cut wherever the gap between neighbours exceeds ``tol``.  Returns
    ``(classes, ambiguous)`` where ``ambiguous`` flags a gap in
    (tol, 10 tol].
    """
    values = list(values)
    if values and all(not isinstance(v, float) for v in values):
        groups = {}
        for k, v in enumerate(values):
            groups.setdefault(v, []).append(k)
        return _canonical(groups.values()), False
    order = sorted(range(len(values)), key=lambda k: (values[k], k))
    classes, current, ambiguous = [], [order[0]], False
    for prev, k in zip(order, order[1:]):
        gap = values[k] - values[prev]
        if gap > tol:
            ambiguous |= gap <= AMBIGUITY_FACTOR * tol
            classes.append(current)
            current = [k]
        else:
            current.append(k)
    classes.append(current)
    return _canonical(classes), ambiguous


def _distance(a, b) -> float:
    return float(np.max(np.abs(np.asarray(a, dtype=complex) - np.asarray(b, dtype=complex))))


def cluster_items(items, tol: float = DEFAULT_TOL, exact: bool = False, within=None):
    """Partition indices of vector/matrix ``items`` into equality classes.

    Float mode links two items when their max-abs entrywise difference is at
    most ``tol`` and takes connected components.  ``within`` restricts linking
    to members of the same parent class, which makes the result refine it.
    """
    n = len(items)
    parents = within if within is not None else (tuple(range(n)),)
    classes, ambiguous = [], False
    if exact:
        for parent in parents:
            groups = {}
            for k in parent:
                groups.setdefault(items[k], []).append(k)
            classes.extend(groups.values())
        return _canonical(classes), False
    label = list(range(n))

    def find(k):
        while label[k] != k:
            label[k] = label[label[k]]
            k = label[k]
        return k

    parent_of = {k: pi for pi, parent in enumerate(parents) for k in parent}
    for a, b in itertools.combinations(range(n), 2):
        d = _distance(items[a], items[b])
        if d <= tol:
            if parent_of[a] == parent_of[b]:
                label[find(a)] = find(b)
        elif d <= AMBIGUITY_FACTOR * tol:
            ambiguous = True
    groups = {}
    for k in range(n):
        groups.setdefault(find(k), []).append(k)
    return _canonical(groups.values()), ambiguous


def _refines(fine, coarse) -> bool:
    owner = {k: ci for ci, c in enumerate(coarse) for k in c}
    return all(len({owner[k] for k in c}) == 1 for c in fine)


# --- partitions ------------------------------------------------------------------

@dataclass(frozen=True)
class PartitionSummary:
    """Equality partitions (0-based index classes) of one state.

    CC states fill the row/column fields, CQ states the weight/block fields.
    """

    flavor: str
    row_sum_classes: tuple = ()
    col_sum_classes: tuple = ()
    row_eq_classes: tuple = ()
    col_eq_classes: tuple = ()
    weight_classes: tuple = ()
    block_classes: tuple = ()
    ambiguous: bool = False

    def __post_init__(self):
        pairs = ([(self.row_eq_classes, self.row_sum_classes), (self.col_eq_classes, self.col_sum_classes)]
                 if self.flavor == "cc" else [(self.block_classes, self.weight_classes)])
        for fine, coarse in pairs:
            if not _refines(fine, coarse):
                raise ValueError("equality partition does not refine its sum partition")

    def sizes(self) -> dict:
        names = (("row_sum_classes", "row_eq_classes", "col_sum_classes", "col_eq_classes")
                 if self.flavor == "cc" else ("weight_classes", "block_classes"))
        return {k: sorted((len(c) for c in getattr(self, k)), reverse=True) for k in names}


def cc_partitions(s: CCState, tol: float = DEFAULT_TOL) -> PartitionSummary:
    exact = s.exact
    row_sum, amb1 = cluster_scalars(s.row_sums(), tol)
    col_sum, amb2 = cluster_scalars(s.col_sums(), tol)
    cols = list(zip(*s.p))
    row_eq, amb3 = cluster_items(list(s.p), tol, exact, within=row_sum)
    col_eq, amb4 = cluster_items(cols, tol, exact, within=col_sum)
    return PartitionSummary("cc", row_sum, col_sum, row_eq, col_eq,
                            ambiguous=amb1 or amb2 or amb3 or amb4)


def cq_partitions(s: CQState, tol: float = DEFAULT_TOL) -> PartitionSummary:
    weights, amb1 = cluster_scalars(s.p, tol)
    blocks = [s.weighted_block(i) for i in range(s.n1)]
    block_cls, amb2 = cluster_items(blocks, tol, s.exact, within=weights)
    return PartitionSummary("cq", weight_classes=weights, block_classes=block_cls,
                            ambiguous=amb1 or amb2)


def _pairs(classes) -> int:
    return sum(comb(len(c), 2) for c in classes)


# --- CC formulas ---------------------------------------------------------------------

def cc_dim(ps: PartitionSummary, n1: int, n2: int) -> int:
    """Orbit dimension: two per root of SU(N1) x SU(N2) not killing rho."""
    return 2 * (comb(n1, 2) - _pairs(ps.row_eq_classes) + comb(n2, 2) - _pairs(ps.col_eq_classes))


def cc_rank(ps: PartitionSummary, n1: int, n2: int) -> int:
    """Rank of the restricted KKS form: two per root with tr(rho H) != 0."""
    return 2 * (comb(n1, 2) - _pairs(ps.row_sum_classes) + comb(n2, 2) - _pairs(ps.col_sum_classes))


def cc_degeneracy(ps: PartitionSummary) -> int:
    return 2 * (_pairs(ps.row_sum_classes) - _pairs(ps.row_eq_classes)
                + _pairs(ps.col_sum_classes) - _pairs(ps.col_eq_classes))


def _close(a, b, tol, exact) -> bool:
    return a == b if exact else abs(a - b) <= tol


def cc_symplectic_conditions(s: CCState, tol: float = DEFAULT_TOL) -> bool:
    """Equal row sums force identical rows, equal column sums identical columns.

    Checked pairwise on the raw weights, independently of the partitions.
    """
    for mat in (s.p, tuple(zip(*s.p))):
        zero = 0 if s.exact else 0.0
        sums = [sum(r, zero) for r in mat]
        for i, j in itertools.combinations(range(len(mat)), 2):
            if _close(sums[i], sums[j], tol, s.exact) and not all(
                    _close(a, b, tol, s.exact) for a, b in zip(mat[i], mat[j])):
                return False
    return True


def cc_is_kahler(s: CCState, tol: float = DEFAULT_TOL) -> bool:
    """True for a pure product state or the maximally mixed state."""
    flat = [v for r in s.p for v in r]
    n = len(flat)
    one, uniform = (1, type(flat[0])(1) / n) if s.exact else (1.0, 1.0 / n)
    pure = sum(1 for v in flat if _close(v, one, tol, s.exact)) == 1 and \
        sum(1 for v in flat if _close(v, 0, tol, s.exact)) == n - 1
    mixed = all(_close(v, uniform, tol, s.exact) for v in flat)
    return pure or mixed


def cc_is_magic(s: CCState, tol: float = DEFAULT_TOL) -> bool:
    """Magic rectangle: distinct entries along every row and column, all row
    sums equal and all column sums equal."""
    for mat in (s.p, tuple(zip(*s.p))):
        for line in mat:
            if any(_close(a, b, tol, s.exact) for a, b in itertools.combinations(line, 2)):
                return False
        sums = [sum(line) for line in mat]
        if any(not _close(sums[0], t, tol, s.exact) for t in sums[1:]):
            return False
    return True


# --- CQ formulas ---------------------------------------------------------------------

def cq_dim(ps: PartitionSummary, n1: int) -> int:
    return 2 * (comb(n1, 2) - _pairs(ps.block_classes))


def cq_rank(ps: PartitionSummary, n1: int) -> int:
    return 2 * (comb(n1, 2) - _pairs(ps.weight_classes))


def cq_degeneracy(ps: PartitionSummary) -> int:
    return 2 * (_pairs(ps.weight_classes) - _pairs(ps.block_classes))


def cq_symplectic_conditions(s: CQState, tol: float = DEFAULT_TOL) -> bool:
    """p_i == p_j must force p_i rho_i == p_j rho_j."""
    for i, j in itertools.combinations(range(s.n1), 2):
        if _close(s.p[i], s.p[j], tol, s.exact):
            a, b = s.weighted_block(i), s.weighted_block(j)
            if (a != b) if s.exact else _distance(a, b) > tol:
                return False
    return True


# --- reports -------------------------------------------------------------------------

@dataclass(frozen=True)
class OrbitReport:
    dim: int
    rank: int
    degeneracy: int
    symplectic: bool
    kahler: bool | None
    euler: int
    magic_rectangle: bool | None = None
    warnings: tuple = ()

    def __post_init__(self):
        # an orbit off CC/CQ form may be odd dimensional; a skew form never has odd rank
        if self.rank % 2:
            raise ValueError(f"odd rank {self.rank}")
        if self.degeneracy != self.dim - self.rank or self.degeneracy < 0:
            raise ValueError(f"inconsistent degeneracy {self.degeneracy} for dim {self.dim}, rank {self.rank}")
        if self.symplectic != (self.degeneracy == 0):
            raise ValueError("symplectic flag disagrees with degeneracy")

    def as_dict(self) -> dict:
        return {"dim": self.dim, "rank": self.rank, "degeneracy": self.degeneracy,
                "symplectic": self.symplectic, "kahler": self.kahler,
                "magic_rectangle": self.magic_rectangle, "euler": self.euler,
                "warnings": list(self.warnings)}


def _warnings(ps):
    return ("ambiguous clustering: a gap lies within a factor 10 of the tolerance",) if ps.ambiguous else ()


def cc_report(s: CCState, tol: float = DEFAULT_TOL, ps: PartitionSummary | None = None) -> OrbitReport:
    ps = ps or cc_partitions(s, tol)
    dim = cc_dim(ps, s.n1, s.n2)
    rank = cc_rank(ps, s.n1, s.n2)
    return OrbitReport(dim=dim, rank=rank, degeneracy=dim - rank,
                       symplectic=dim == rank,
                       kahler=cc_is_kahler(s, tol),
                       magic_rectangle=cc_is_magic(s, tol),
                       euler=topology.euler_cc(s, ps),
                       warnings=_warnings(ps))


def cq_report(s: CQState, tol: float = DEFAULT_TOL, ps: PartitionSummary | None = None) -> OrbitReport:
    ps = ps or cq_partitions(s, tol)
    dim = cq_dim(ps, s.n1)
    rank = cq_rank(ps, s.n1)
    return OrbitReport(dim=dim, rank=rank, degeneracy=dim - rank,
                       symplectic=dim == rank, kahler=None,
                       euler=topology.euler_cq(s, ps),
                       warnings=_warnings(ps))


@dataclass(frozen=True)
class Classification:
    group: GroupSpec
    report: OrbitReport
    partitions: PartitionSummary | None
    stabilizer: topology.StabilizerDescriptor | None
    source: str = "formula"   # "oracle" when no combinatorial formula applies
    notes: tuple = field(default=())


def default_group(state) -> GroupSpec:
    if isinstance(state, CCState):
        return GroupSpec.full(state.n1, state.n2)
    return GroupSpec.left(state.n1, state.n2)


def classify_state(state, group: GroupSpec | None = None, tol: float = DEFAULT_TOL,
                   check_bookkeeping: bool = True) -> Classification:
    """Full classification of a CC or CQ state under ``group``.

    CC states under SU(N1) x I are treated as CQ states; CQ states under the
    full LU group are treated as CC states when their blocks are diagonal.
    Otherwise the orbit carries no CC structure, the Euler characteristic is 0
    and dimension and rank come from the numerical oracle.  With
    ``check_bookkeeping`` off, an inconsistent stabilizer count is reported
    rather than raised.
    """
    if isinstance(state, PureSeparableSpec):
        raise TypeError("pure separable specs have no mixed-state orbit report; use topology")
    group = group or default_group(state)
    if (group.n1, group.n2) != (state.n1, state.n2):
        raise StateError(f"group dimensions {group.n1}x{group.n2} do not match state {state.n1}x{state.n2}")
    notes = ()
    if isinstance(state, CCState) and group.variant is Variant.LEFT_ONLY:
        state, notes = cc_as_cq(state), ("CC state treated as CQ for SU(N1) x I",)
    if isinstance(state, CQState) and group.variant is Variant.FULL_LU:
        if state.blocks_diagonal():
            state, notes = cq_as_cc(state), ("CQ state with diagonal blocks treated as CC",)
        else:
            cc = commuting_blocks_as_cc(state, tol)
            if cc is None:
                return _oracle_classification(state, group, tol)
            state, notes = cc, ("commuting CQ blocks rotated to a CC state by I (x) V",)
    if isinstance(state, CCState):
        ps = cc_partitions(state, tol)
        report = cc_report(state, tol, ps)
    else:
        ps = cq_partitions(state, tol)
        report = cq_report(state, tol, ps)
    stab = topology.stabilizer_structure(state, group, ps,
                                         orbit_dim=report.dim if check_bookkeeping else None)
    return Classification(group, report, ps, stab, notes=notes)


def commuting_blocks_as_cc(s: CQState, tol: float = DEFAULT_TOL) -> CCState | None:
    """CC representative of a CQ state whose blocks pairwise commute.

    Commuting blocks share an eigenbasis V, so the state is LU-equivalent to a
    CC state via I (x) V.  Returns None when some pair fails to commute.
    """
    if not topology.blocks_commute(s, tol):
        return None
    blocks = [s.block_array(i) for i in range(s.n1)]
    # generic real combination: its eigenspaces are common eigenspaces
    coeffs = np.random.default_rng(12345).uniform(1.0, 2.0, size=len(blocks))
    _, v = np.linalg.eigh(sum(c * b for c, b, w in zip(coeffs, blocks, s.p) if w > 0))
    rows = []
    for i, b in enumerate(blocks):
        d = np.clip(np.real(np.diag(v.conj().T @ b @ v)), 0.0, None)
        rows.append(tuple(float(s.p[i]) * d / d.sum()))
    total = sum(map(sum, rows))
    return CCState(tuple(tuple(x / total for x in r) for r in rows))


def _oracle_classification(state: CQState, group: GroupSpec, tol: float) -> Classification:
    from . import oracle
    from .states import cq_to_density

    orc = oracle.numeric_orbit_report(cq_to_density(state), group)
    warnings = orc.warnings
    report = OrbitReport(dim=orc.dim, rank=orc.rank_omega, degeneracy=orc.degeneracy,
                         symplectic=orc.degeneracy == 0, kahler=None, euler=0,
                         warnings=warnings)
    return Classification(group, report, None, None, source="oracle",
                          notes=("blocks not diagonal in the declared basis: no CC form, Euler characteristic 0",))
