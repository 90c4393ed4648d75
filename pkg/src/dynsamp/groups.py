"""Finite abelian groups Z_{d1} x ... x Z_{dn} and their normalized Fourier matrices.

Group elements are addressed either by a multi-index (one residue per cyclic
factor) or by a flat index in row-major order, so that for two factors
``(i1, i2) <-> d2 * i1 + i2``.  That is the labeling under which the Fourier
matrix of the product group is the Kronecker product of the factor matrices.
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import Union

import numpy as np

#: relative rank tolerance (fraction of the largest singular value)
RANK_TOL = 1e-9
#: absolute floor below which a singular value is always treated as zero
RANK_FLOOR = 1e-12

GroupIndex = tuple[int, ...]
IndexLike = Union[int, np.integer, Iterable[int]]


@dataclass(frozen=True)
class FiniteGroup:
    """Product of cyclic groups with flat/multi index arithmetic."""

    factors: tuple[int, ...]

    def __post_init__(self) -> None:
        factors = tuple(int(f) for f in self.factors)
        if not factors:
            raise ValueError("a group needs at least one cyclic factor")
        if any(f < 1 for f in factors):
            raise ValueError(f"cyclic factors must be >= 1, got {factors}")
        object.__setattr__(self, "factors", factors)

    @property
    def order(self) -> int:
        return math.prod(self.factors)

    @property
    def ndim(self) -> int:
        return len(self.factors)

    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        return "FiniteGroup(" + " x ".join(f"Z_{f}" for f in self.factors) + ")"

    def reduce(self, idx: Iterable[int]) -> GroupIndex:
        """Component-wise reduction of an arbitrary integer tuple."""
        idx = tuple(int(i) for i in idx)
        if len(idx) != self.ndim:
            raise ValueError(f"expected {self.ndim} components, got {idx}")
        return tuple(i % f for i, f in zip(idx, self.factors))

    def flat(self, idx: IndexLike) -> int:
        """Flat index of ``idx``; ints are taken as flat indices already."""
        if isinstance(idx, (int, np.integer)):
            i = int(idx)
            if not 0 <= i < self.order:
                raise IndexError(f"flat index {i} out of range for order {self.order}")
            return i
        multi = tuple(int(i) for i in idx)
        if len(multi) != self.ndim:
            raise IndexError(f"index {multi} does not have {self.ndim} components")
        if any(not 0 <= i < f for i, f in zip(multi, self.factors)):
            raise IndexError(f"index {multi} out of range for factors {self.factors}")
        return int(np.ravel_multi_index(multi, self.factors))

    def multi(self, flat: int) -> GroupIndex:
        return tuple(int(i) for i in np.unravel_index(self.flat(flat), self.factors))

    def add(self, a: IndexLike, b: IndexLike) -> GroupIndex:
        a, b = self.multi(self.flat(a)), self.multi(self.flat(b))
        return self.reduce(x + y for x, y in zip(a, b))

    def neg(self, a: IndexLike) -> GroupIndex:
        return self.reduce(-x for x in self.multi(self.flat(a)))

    def scale(self, a: IndexLike, c: int | Iterable[int]) -> GroupIndex:
        cs = (c,) * self.ndim if isinstance(c, (int, np.integer)) else tuple(c)
        return self.reduce(x * k for x, k in zip(self.multi(self.flat(a)), cs))

    def index_set(self, items: Iterable[IndexLike]) -> tuple[int, ...]:
        """Sorted, de-duplicated flat indices."""
        return tuple(sorted({self.flat(i) for i in items}))

    def elements(self) -> range:
        return range(self.order)


def make_group(factors: Iterable[int] | int) -> FiniteGroup:
    if isinstance(factors, (int, np.integer)):
        factors = (int(factors),)
    return FiniteGroup(tuple(factors))


@dataclass(frozen=True, eq=False)
class CharacterMatrix:
    """Normalized character table: rows are characters, columns group elements."""

    group: FiniteGroup
    entries: np.ndarray

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


def _cyclic_fourier(d: int) -> np.ndarray:
    # exponents reduced mod d before exponentiating keeps the phases exact
    jk = np.outer(np.arange(d), np.arange(d)) % d
    return np.exp(-2j * np.pi * jk / d) / np.sqrt(d)


@lru_cache(maxsize=64)
def _fourier_entries(factors: tuple[int, ...]) -> np.ndarray:
    mat = reduce(np.kron, (_cyclic_fourier(d) for d in factors))
    mat.flags.writeable = False
    return mat


def fourier_matrix(group: FiniteGroup) -> CharacterMatrix:
    """``F_{d1} (x) ... (x) F_{dn}`` with ``F_d = (w^{jk}) / sqrt(d)``, ``w = exp(-2 pi i / d)``."""
    return CharacterMatrix(group, _fourier_entries(group.factors))


def _as_indices(group: FiniteGroup | None, items, n: int) -> np.ndarray:
    items = list(items)
    if group is not None:
        idx = sorted({group.flat(i) for i in items})
    else:
        idx = sorted({int(i) for i in items})
        if any(not 0 <= i < n for i in idx):
            raise IndexError(f"indices {idx} out of range for size {n}")
    return np.asarray(idx, dtype=np.intp)


def submatrix(mat, rows, cols=None) -> np.ndarray:
    """Dense rows x cols block, indices sorted ascending by flat index.

    ``cols=None`` keeps every column.  Multi-indices are accepted when ``mat``
    is a :class:`CharacterMatrix`.
    """
    group = mat.group if isinstance(mat, CharacterMatrix) else None
    arr = np.asarray(mat)
    r = _as_indices(group, rows, arr.shape[0])
    c = np.arange(arr.shape[1]) if cols is None else _as_indices(group, cols, arr.shape[1])
    return arr[np.ix_(r, c)]


def singular_values(mat) -> np.ndarray:
    arr = np.asarray(mat)
    if arr.size == 0:
        return np.zeros(0)
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return np.linalg.svd(arr, compute_uv=False)


def rank_from_singular_values(s: np.ndarray, tol: float = RANK_TOL, floor: float = RANK_FLOOR) -> int:
    if s.size == 0:
        return 0
    smax = float(s.max())
    if smax <= floor:
        return 0
    return int(np.count_nonzero((s > tol * smax) & (s > floor)))


def numerical_rank(mat, tol: float = RANK_TOL, floor: float = RANK_FLOOR) -> int:
    """Number of singular values above ``tol * sigma_max`` and above ``floor``."""
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    return rank_from_singular_values(singular_values(mat), tol, floor)
