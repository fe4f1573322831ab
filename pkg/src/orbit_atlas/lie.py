"""Root-basis generators of su(N) embedded in the bipartite algebra, and the
invariant inner product / KKS pairing on adjoint orbits."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .states import DensityMatrix

ANTIHERM_TOL = 1e-12
INNER_IMAG_TOL = 1e-10
KKS_IMAG_TOL = 1e-8


class Variant(enum.Enum):
    FULL_LU = "lu"      # SU(N1) x SU(N2)
    LEFT_ONLY = "left"  # SU(N1) x I


@dataclass(frozen=True)
class GroupSpec:
    variant: Variant
    n1: int
    n2: int

    def __post_init__(self):
        if self.n1 < 1 or self.n2 < 1:
            raise ValueError(f"group dimensions must be positive, got {self.n1}, {self.n2}")

    @classmethod
    def full(cls, n1, n2):
        return cls(Variant.FULL_LU, n1, n2)

    @classmethod
    def left(cls, n1, n2):
        return cls(Variant.LEFT_ONLY, n1, n2)

    @property
    def algebra_dim(self) -> int:
        d = self.n1 ** 2 - 1
        if self.variant is Variant.FULL_LU:
            d += self.n2 ** 2 - 1
        return d

    @property
    def rank(self) -> int:
        """Rank of the group (dimension of a maximal torus)."""
        r = self.n1 - 1
        if self.variant is Variant.FULL_LU:
            r += self.n2 - 1
        return r


@dataclass(frozen=True)
class Label:
    kind: str   # "cartan", "x" or "y"
    i: int      # 0-based, i < j
    j: int
    side: str   # "left", "right" or "none" (unembedded)

    def __str__(self):
        name = {"cartan": "iH", "x": "X", "y": "Y"}[self.kind]
        return f"{name}_{self.i + 1}{self.j + 1}[{self.side}]"


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    label: Label
    matrix: np.ndarray


@dataclass(frozen=True, eq=False)
class AlgebraBasis:
    group: GroupSpec
    elements: tuple
    cartan_indices: tuple

    def stack(self) -> np.ndarray:
        return np.array([e.matrix for e in self.elements])

    def __len__(self):
        return len(self.elements)


def _unit(n, a, b):
    m = np.zeros((n, n), dtype=complex)
    m[a, b] = 1
    return m


def cartan(n, i, j):
    """iH_ij = i(E_ii - E_jj)."""
    return 1j * (_unit(n, i, i) - _unit(n, j, j))


def root_x(n, i, j):
    """X_ij = i(E_ij + E_ji)."""
    return 1j * (_unit(n, i, j) + _unit(n, j, i))


def root_y(n, i, j):
    """Y_ij = E_ij - E_ji."""
    return _unit(n, i, j) - _unit(n, j, i)


def _embed(a, side, n1, n2):
    if side == "left":
        return np.kron(a, np.eye(n2))
    if side == "right":
        return np.kron(np.eye(n1), a)
    return a


def su_basis(n: int, side: str = "none", group: GroupSpec | None = None) -> list:
    """Basis of su(n): iH_{i,i+1}, then X_ij, Y_ij for i < j.

    With ``side`` "left"/"right" each matrix is embedded as A (x) I or I (x) A
    using the dimensions of ``group``.
    """
    if n < 1:
        raise ValueError(f"su(n) needs n >= 1, got {n}")
    if side != "none" and group is None:
        raise ValueError("embedding requires a group spec")
    n1, n2 = (group.n1, group.n2) if group is not None else (n, 1)
    if side == "left" and n != n1 or side == "right" and n != n2:
        raise ValueError(f"su({n}) does not match the {side} factor of {group}")
    out = []
    for i in range(n - 1):
        out.append(AlgebraElement(Label("cartan", i, i + 1, side),
                                  _embed(cartan(n, i, i + 1), side, n1, n2)))
    for i in range(n):
        for j in range(i + 1, n):
            out.append(AlgebraElement(Label("x", i, j, side), _embed(root_x(n, i, j), side, n1, n2)))
            out.append(AlgebraElement(Label("y", i, j, side), _embed(root_y(n, i, j), side, n1, n2)))
    return out


@lru_cache(maxsize=64)
def build_basis(group: GroupSpec) -> AlgebraBasis:
    elems = su_basis(group.n1, "left", group)
    if group.variant is Variant.FULL_LU:
        elems += su_basis(group.n2, "right", group)
    for e in elems:
        e.matrix.setflags(write=False)
    cart = tuple(k for k, e in enumerate(elems) if e.label.kind == "cartan")
    return AlgebraBasis(group, tuple(elems), cart)


def full_basis(n: int) -> list:
    """Unembedded su(n) basis, for the full isospectral orbit."""
    return su_basis(n)


def _mat(x):
    return x.matrix if isinstance(x, AlgebraElement) else np.asarray(x)


def commutator(a, b) -> np.ndarray:
    a, b = _mat(a), _mat(b)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"commutator shape mismatch: {a.shape} vs {b.shape}")
    return a @ b - b @ a


def hs_inner(a, b) -> float:
    """(a|b) = -tr(ab), the invariant inner product on anti-Hermitian matrices."""
    a, b = _mat(a), _mat(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    v = -np.einsum("ij,ji->", a, b)
    if abs(v.imag) > INNER_IMAG_TOL:
        raise ValueError(f"inner product has imaginary residue {v.imag:.3e}")
    return float(v.real)


def _rho(rho):
    return rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho)


def fundamental_vector(x, rho) -> np.ndarray:
    """[X, rho], the orbit direction generated by X at rho."""
    return commutator(x, _rho(rho))


def kks_pairing(x, y, rho) -> float:
    """omega(x, y) = -tr(i rho [y, x])."""
    r = _rho(rho)
    v = -np.trace(1j * r @ commutator(y, x))
    if abs(v.imag) > KKS_IMAG_TOL:
        raise ValueError(f"KKS pairing has imaginary residue {v.imag:.3e}")
    return float(v.real)


def random_algebra_element(group: GroupSpec, rng: np.random.Generator) -> np.ndarray:
    basis = build_basis(group).stack()
    return np.tensordot(rng.normal(size=len(basis)), basis, axes=1)
