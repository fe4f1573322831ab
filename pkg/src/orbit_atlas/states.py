"""State types for bipartite CC / CQ states and their density-matrix embeddings.

Weights are carried either as exact rationals (:class:`fractions.Fraction`) or
as floats; a single state never mixes the two.  Exact CQ blocks use
:class:`GaussianRational` entries so that ``p_i * rho_i`` can be compared
exactly.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from typing import Sequence, Union

import numpy as np

NORM_TOL = 1e-12
HERM_TOL = 1e-12
PSD_TOL = 1e-10

Scalar = Union[Fraction, float]


class StateError(ValueError):
    """Raised for malformed or invalid state input."""


@dataclass(frozen=True)
class GaussianRational:
    re: Fraction
    im: Fraction = Fraction(0)

    def __add__(self, other):
        return GaussianRational(self.re + other.re, self.im + other.im)

    def __sub__(self, other):
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __mul__(self, other):
        if isinstance(other, GaussianRational):
            return GaussianRational(self.re * other.re - self.im * other.im,
                                    self.re * other.im + self.im * other.re)
        return GaussianRational(self.re * other, self.im * other)

    __rmul__ = __mul__

    def __truediv__(self, r: Fraction):
        return GaussianRational(self.re / r, self.im / r)

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def is_zero(self):
        return self.re == 0 and self.im == 0


def _exact_psd(mat) -> bool:
    """Exact PSD test for a Hermitian Gaussian-rational matrix.

    Symmetric Gaussian elimination on diagonal pivots: a PSD matrix never needs
    a negative pivot, and a zero pivot forces its whole row to vanish.
    """
    a = [list(row) for row in mat]
    n = len(a)
    for k in range(n):
        d = a[k][k].re
        if d < 0:
            return False
        if d == 0:
            if any(not a[k][j].is_zero() for j in range(k + 1, n)):
                return False
            continue
        for i in range(k + 1, n):
            f = a[i][k] / d
            if f.is_zero():
                continue
            for j in range(k + 1, n):
                a[i][j] = a[i][j] - f * a[k][j]
    return True


def _check_weights(values: Sequence[Scalar], exact: bool, what: str) -> None:
    for v in values:
        if not exact and not math.isfinite(v):
            raise StateError(f"{what}: non-finite weight {v!r}")
        if v < 0:
            raise StateError(f"{what}: negative weight {v}")
    total = sum(values, Fraction(0) if exact else 0.0)
    if exact:
        if total != 1:
            raise StateError(f"{what}: weights sum to {total}, not 1")
    elif abs(total - 1.0) > NORM_TOL:
        raise StateError(f"{what}: weights sum to {total!r}, not 1 (tol {NORM_TOL})")


@dataclass(frozen=True)
class CCState:
    """Weights p[i][j] of rho = sum p_ij |i><i| (x) |j><j|."""

    p: tuple

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.p)
        if not rows or not rows[0]:
            raise StateError("CC state needs a non-empty weight matrix")
        if len({len(r) for r in rows}) != 1:
            raise StateError("ragged CC weight matrix")
        flat = [v for r in rows for v in r]
        exact = _scalar_mode(flat)
        if not exact:
            rows = tuple(tuple(float(v) for v in r) for r in rows)
            flat = [v for r in rows for v in r]
        _check_weights(flat, exact, "CC state")
        object.__setattr__(self, "p", rows)

    @property
    def n1(self) -> int:
        return len(self.p)

    @property
    def n2(self) -> int:
        return len(self.p[0])

    @property
    def exact(self) -> bool:
        return isinstance(self.p[0][0], Fraction)

    def array(self) -> np.ndarray:
        return np.array([[float(v) for v in r] for r in self.p])

    def to_float(self) -> "CCState":
        return CCState(tuple(tuple(float(v) for v in r) for r in self.p))

    def transpose(self) -> "CCState":
        return CCState(tuple(zip(*self.p)))

    def row_sums(self) -> list:
        zero = Fraction(0) if self.exact else 0.0
        return [sum(r, zero) for r in self.p]

    def col_sums(self) -> list:
        return self.transpose().row_sums()


@dataclass(frozen=True)
class CQState:
    """rho = sum_i p_i |i><i| (x) rho_i.

    In exact mode ``blocks`` hold :class:`GaussianRational` entries, in float
    mode they are complex ndarrays.
    """

    p: tuple
    blocks: tuple

    def __post_init__(self):
        p = tuple(self.p)
        if not p:
            raise StateError("CQ state needs at least one weight")
        exact = _scalar_mode(p)
        if not exact:
            p = tuple(float(v) for v in p)
        _check_weights(p, exact, "CQ state")
        if len(self.blocks) != len(p):
            raise StateError(f"CQ state has {len(p)} weights but {len(self.blocks)} blocks")
        if exact:
            blocks = tuple(tuple(tuple(_as_gauss(z) for z in row) for row in b) for b in self.blocks)
            n2 = len(blocks[0])
            for k, b in enumerate(blocks):
                if len(b) != n2 or any(len(row) != n2 for row in b):
                    raise StateError(f"block {k} is not {n2}x{n2}")
                _validate_exact_block(b, k)
        else:
            blocks = tuple(np.array(b, dtype=complex) for b in self.blocks)
            n2 = blocks[0].shape[0] if blocks[0].ndim == 2 else 0
            for k, b in enumerate(blocks):
                if b.shape != (n2, n2) or n2 == 0:
                    raise StateError(f"block {k} has shape {b.shape}, expected ({n2}, {n2})")
                _validate_float_block(b, k)
                b.setflags(write=False)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "blocks", blocks)

    @property
    def n1(self) -> int:
        return len(self.p)

    @property
    def n2(self) -> int:
        return len(self.blocks[0])

    @property
    def exact(self) -> bool:
        return isinstance(self.p[0], Fraction)

    def block_array(self, i: int) -> np.ndarray:
        b = self.blocks[i]
        if self.exact:
            return np.array([[complex(z) for z in row] for row in b])
        return np.asarray(b)

    def weighted_block(self, i: int):
        """p_i * rho_i (exact nested tuples or complex ndarray)."""
        if self.exact:
            return tuple(tuple(z * self.p[i] for z in row) for row in self.blocks[i])
        return self.p[i] * np.asarray(self.blocks[i])

    def to_float(self) -> "CQState":
        return CQState(tuple(float(v) for v in self.p),
                       tuple(self.block_array(i) for i in range(self.n1)))

    def blocks_diagonal(self) -> bool:
        for i in range(self.n1):
            if self.exact:
                b = self.blocks[i]
                if any(not b[r][c].is_zero() for r in range(self.n2) for c in range(self.n2) if r != c):
                    return False
            else:
                b = np.asarray(self.blocks[i])
                if np.max(np.abs(b - np.diag(np.diag(b))), initial=0.0) > HERM_TOL:
                    return False
        return True

    def __eq__(self, other):
        if not isinstance(other, CQState) or self.exact != other.exact or self.p != other.p:
            return False
        if self.exact:
            return self.blocks == other.blocks
        return all(np.array_equal(a, b) for a, b in zip(self.blocks, other.blocks))

    __hash__ = None


@dataclass(frozen=True)
class PureSeparableSpec:
    dims: tuple

    def __post_init__(self):
        dims = tuple(self.dims)
        if not dims:
            raise StateError("pure separable spec needs at least one factor")
        for d in dims:
            if isinstance(d, bool) or not isinstance(d, int) or d < 1:
                raise StateError(f"invalid local dimension {d!r}")
        object.__setattr__(self, "dims", dims)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Dense complex density matrix.

    ``exact_diag`` is set when the matrix is known to be diagonal with exact
    rational entries; :func:`spectrum` then returns Fractions.
    """

    entries: np.ndarray
    exact_diag: tuple | None = field(default=None)

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise StateError(f"density matrix must be square, got shape {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > HERM_TOL:
            raise StateError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1) > NORM_TOL:
            raise StateError(f"density matrix has trace {np.trace(m).real!r}")
        if np.linalg.eigvalsh(m).min() < -PSD_TOL:
            raise StateError("density matrix is not positive semidefinite")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def _scalar_mode(values) -> bool:
    """True for exact (all Fraction), False for float; raise on mixing."""
    kinds = {isinstance(v, Fraction) for v in values}
    if len(kinds) > 1:
        raise StateError("exact and float scalars mixed within one state")
    exact = kinds.pop()
    if not exact:
        for v in values:
            if isinstance(v, bool) or not isinstance(v, Real):
                raise StateError(f"not a real scalar: {v!r}")
    return exact


def _as_gauss(z) -> GaussianRational:
    if isinstance(z, GaussianRational):
        return z
    if isinstance(z, Fraction):
        return GaussianRational(z)
    raise StateError(f"exact block entry expected, got {z!r}")


def _validate_exact_block(b, k: int) -> None:
    n = len(b)
    for r in range(n):
        for c in range(n):
            if b[r][c] != b[c][r].conjugate():
                raise StateError(f"block {k} is not Hermitian")
    tr = sum((b[r][r].re for r in range(n)), Fraction(0))
    if tr != 1:
        raise StateError(f"block {k} has trace {tr}")
    if not _exact_psd(b):
        raise StateError(f"block {k} is not positive semidefinite")


def _validate_float_block(b: np.ndarray, k: int) -> None:
    if not np.all(np.isfinite(b)):
        raise StateError(f"block {k} has non-finite entries")
    if np.max(np.abs(b - b.conj().T)) > HERM_TOL:
        raise StateError(f"block {k} is not Hermitian")
    if abs(np.trace(b) - 1) > NORM_TOL:
        raise StateError(f"block {k} has trace {np.trace(b).real!r}")
    if np.linalg.eigvalsh(b).min() < -PSD_TOL:
        raise StateError(f"block {k} is not positive semidefinite")


# --- embeddings --------------------------------------------------------------

def cc_to_density(s: CCState) -> DensityMatrix:
    """Diagonal matrix with p_ij at composite index i*n2 + j (row-major)."""
    diag = [v for row in s.p for v in row]
    m = np.diag(np.array([float(v) for v in diag], dtype=complex))
    return DensityMatrix(m, tuple(diag) if s.exact else None)


def cq_to_density(s: CQState) -> DensityMatrix:
    n1, n2 = s.n1, s.n2
    m = np.zeros((n1 * n2, n1 * n2), dtype=complex)
    for i in range(n1):
        m[i * n2:(i + 1) * n2, i * n2:(i + 1) * n2] = float(s.p[i]) * s.block_array(i)
    exact_diag = None
    if s.exact and s.blocks_diagonal():
        exact_diag = tuple(s.p[i] * s.blocks[i][j][j].re for i in range(n1) for j in range(n2))
    return DensityMatrix(m, exact_diag)


def spectrum(m: DensityMatrix) -> list:
    """Eigenvalues in descending order (Fractions when exactly diagonal)."""
    e = m.entries
    if m.exact_diag is not None and not np.any(e - np.diag(np.diag(e))):
        return sorted(m.exact_diag, reverse=True)
    try:
        w = np.linalg.eigvalsh(e)
    except np.linalg.LinAlgError as exc:
        raise StateError(f"eigensolver failed: {exc}") from exc
    return [float(x) for x in w[::-1]]


def cc_as_cq(s: CCState) -> CQState:
    """View a CC state as CQ: p_i = row sums, rho_i = diag(row_i) / p_i.

    Rows of zero weight get the maximally mixed block; p_i * rho_i is then the
    zero matrix as it must be.
    """
    sums = s.row_sums()
    blocks = []
    for row, r in zip(s.p, sums):
        if s.exact:
            diag = [v / r for v in row] if r else [Fraction(1, s.n2)] * s.n2
            zero = GaussianRational(Fraction(0))
            blocks.append(tuple(tuple(GaussianRational(diag[a]) if a == b else zero
                                      for b in range(s.n2)) for a in range(s.n2)))
        else:
            diag = [v / r for v in row] if r > 0 else [1.0 / s.n2] * s.n2
            blocks.append(np.diag(np.array(diag, dtype=complex)))
    if not s.exact:
        # renormalise away rounding in v / r
        blocks = [b / np.trace(b).real for b in blocks]
    return CQState(tuple(sums), tuple(blocks))


def cq_as_cc(s: CQState) -> CCState:
    """p_ij = p_i * (rho_i)_jj; only meaningful for diagonal blocks."""
    if not s.blocks_diagonal():
        raise StateError("CQ blocks are not diagonal")
    if s.exact:
        return CCState(tuple(tuple(s.p[i] * s.blocks[i][j][j].re for j in range(s.n2))
                             for i in range(s.n1)))
    rows = [[s.p[i] * float(np.real(s.blocks[i][j, j])) for j in range(s.n2)] for i in range(s.n1)]
    return CCState(tuple(tuple(r) for r in rows))


# --- JSON --------------------------------------------------------------------

def _parse_scalar(v, where: str):
    if isinstance(v, bool):
        raise StateError(f"{where}: boolean is not a scalar")
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise StateError(f"{where}: bad rational {v!r}") from exc
    if isinstance(v, (int, float)):
        f = float(v)
        if not math.isfinite(f):
            raise StateError(f"{where}: non-finite number")
        return f
    raise StateError(f"{where}: expected number or rational string, got {type(v).__name__}")


def _matrix_shape(rows, where: str) -> int:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise StateError(f"{where}: expected a non-empty array of arrays")
    widths = {len(r) for r in rows}
    if len(widths) != 1 or 0 in widths:
        raise StateError(f"{where}: ragged array")
    return widths.pop()


def parse_state(document) -> CCState | CQState | PureSeparableSpec:
    """Parse a JSON document (str, bytes or already-decoded dict)."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise StateError(f"invalid JSON: {exc}") from exc
    if not isinstance(document, dict) or "kind" not in document:
        raise StateError("document must be an object with a 'kind' field")
    kind = document["kind"]
    if kind == "cc":
        rows = document.get("p")
        _matrix_shape(rows, "p")
        p = [[_parse_scalar(v, f"p[{i}][{j}]") for j, v in enumerate(r)] for i, r in enumerate(rows)]
        return CCState(tuple(tuple(r) for r in p))
    if kind == "cq":
        pv = document.get("p")
        blocks = document.get("blocks")
        if not isinstance(pv, list) or not pv:
            raise StateError("p: expected a non-empty array")
        if not isinstance(blocks, list) or len(blocks) != len(pv):
            raise StateError("blocks: expected one block per weight")
        p = [_parse_scalar(v, f"p[{i}]") for i, v in enumerate(pv)]
        exact = _scalar_mode(p)
        parsed = []
        for k, b in enumerate(blocks):
            n = _matrix_shape(b, f"blocks[{k}]")
            if n != len(b):
                raise StateError(f"blocks[{k}]: not square")
            rows = []
            for r, row in enumerate(b):
                out = []
                for c, z in enumerate(row):
                    if not isinstance(z, list) or len(z) != 2:
                        raise StateError(f"blocks[{k}][{r}][{c}]: expected [re, im]")
                    re, im = (_parse_scalar(x, f"blocks[{k}][{r}][{c}]") for x in z)
                    if isinstance(re, Fraction) != exact or isinstance(im, Fraction) != exact:
                        raise StateError("exact and float scalars mixed within one state")
                    out.append(GaussianRational(re, im) if exact else complex(re, im))
                rows.append(out)
            parsed.append(tuple(tuple(r) for r in rows) if exact else np.array(rows, dtype=complex))
        return CQState(tuple(p), tuple(parsed))
    if kind == "pure_sep":
        dims = document.get("dims")
        if not isinstance(dims, list):
            raise StateError("dims: expected an array of integers")
        return PureSeparableSpec(tuple(dims))
    raise StateError(f"unknown kind {kind!r}")


def format_scalar(v):
    if isinstance(v, Fraction):
        return str(v)
    return float(v)


def serialize_state(s) -> str:
    """Inverse of :func:`parse_state`."""
    if isinstance(s, CCState):
        doc = {"kind": "cc", "p": [[format_scalar(v) for v in r] for r in s.p]}
    elif isinstance(s, CQState):
        if s.exact:
            blocks = [[[[str(z.re), str(z.im)] for z in row] for row in b] for b in s.blocks]
        else:
            blocks = [[[[float(z.real), float(z.imag)] for z in row] for row in b] for b in s.blocks]
        doc = {"kind": "cq", "p": [format_scalar(v) for v in s.p], "blocks": blocks}
    elif isinstance(s, PureSeparableSpec):
        doc = {"kind": "pure_sep", "dims": list(s.dims)}
    else:
        raise TypeError(f"cannot serialize {type(s).__name__}")
    return json.dumps(doc)
