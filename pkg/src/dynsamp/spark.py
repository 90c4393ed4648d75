"""Spark of Fourier row selections, full-spark tests and related transforms."""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from . import _accel
from .groups import (
    RANK_FLOOR,
    RANK_TOL,
    FiniteGroup,
    IndexLike,
    fourier_matrix,
    make_group,
    numerical_rank,
    submatrix,
)

#: default bound on the number of column subsets a spark computation may examine
SPARK_CAP = 2_000_000


class SparkCapExceeded(RuntimeError):
    """The exhaustive subset scan would exceed the configured cap."""

    def __init__(self, size: int, needed: int, cap: int):
        super().__init__(f"scanning {needed} column subsets of size {size} exceeds the cap of {cap}")
        self.size = size
        self.needed = needed
        self.cap = cap


@dataclass(frozen=True)
class RowSelection:
    group: FiniteGroup
    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        rows = self.group.index_set(self.rows)
        if not rows:
            raise ValueError("row selection must be nonempty")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def of(cls, group: FiniteGroup | int | Iterable[int], rows: Iterable[IndexLike]) -> RowSelection:
        if not isinstance(group, FiniteGroup):
            group = make_group(group)
        return cls(group, tuple(group.flat(r) for r in rows))

    def points(self) -> list[tuple[int, ...]]:
        return [self.group.multi(r) for r in self.rows]

    def matrix(self) -> np.ndarray:
        return submatrix(fourier_matrix(self.group), self.rows)

    def __len__(self) -> int:
        return len(self.rows)


def _check_budget(n: int, k: int, used: int, cap: int) -> int:
    needed = math.comb(n, k)
    if used + needed > cap:
        raise SparkCapExceeded(k, needed, cap)
    return used + needed


def spark_witness(mat, tol: float = RANK_TOL, cap: int = SPARK_CAP,
                  backend: str | None = None) -> tuple[int, tuple[int, ...] | None]:
    """Spark of ``mat`` and the first smallest dependent column set (colex order).

    For an ``M x N`` matrix with ``M <= N`` the result is ``(M + 1, None)`` when
    every ``M``-column block is invertible.  When ``M > N`` and the columns are
    independent the spark is reported as ``N + 1``.
    """
    mat = np.asarray(mat, dtype=complex)
    if mat.ndim != 2 or mat.size == 0:
        raise ValueError("spark needs a nonempty 2-D matrix")
    if not np.all(np.isfinite(mat)):
        raise ValueError("matrix has non-finite entries")
    m, n = mat.shape
    top = min(m, n)
    used = 0
    # a full-spark matrix is settled by the top size alone
    used = _check_budget(n, top, used, cap)
    witness, _ = _accel.first_dependent_subset(mat, top, tol, RANK_FLOOR, backend)
    if witness is None:
        return top + 1, None
    for k in range(1, top):
        used = _check_budget(n, k, used, cap)
        found, _ = _accel.first_dependent_subset(mat, k, tol, RANK_FLOOR, backend)
        if found is not None:
            return k, found
    return top, witness


def spark(mat, tol: float = RANK_TOL, cap: int = SPARK_CAP, backend: str | None = None) -> int:
    """Size of the smallest linearly dependent set of columns."""
    return spark_witness(mat, tol, cap, backend)[0]


def is_full_spark(mat, tol: float = RANK_TOL, cap: int = SPARK_CAP, backend: str | None = None) -> bool:
    mat = np.asarray(mat)
    if mat.shape[0] > mat.shape[1]:
        return False
    return spark(mat, tol, cap, backend) == mat.shape[0] + 1


def is_full_spark_rows(sel: RowSelection, tol: float = RANK_TOL, cap: int = SPARK_CAP,
                       backend: str | None = None) -> bool:
    """Whether the Fourier rows in ``sel`` form a full-spark matrix."""
    if len(sel) > sel.group.order:
        raise ValueError("more rows than group elements")
    return is_full_spark(sel.matrix(), tol, cap, backend)


def divisors(d: int) -> list[int]:
    return [m for m in range(1, d + 1) if d % m == 0]


def is_uniformly_distributed(d: int, omega: Iterable[int]) -> bool:
    """Every divisor ``m`` of ``d`` splits ``omega`` into residue classes of near-equal size."""
    omega = sorted({int(i) for i in omega})
    if any(not 0 <= i < d for i in omega):
        raise ValueError(f"indices must lie in Z_{d}")
    size = len(omega)
    for m in divisors(d):
        counts = np.bincount(np.asarray(omega, dtype=np.intp) % m, minlength=m)
        lo, hi = size // m, -(-size // m)
        if counts.min() < lo or counts.max() > hi:
            return False
    return True


def translate_rows(sel: RowSelection, t: IndexLike) -> RowSelection:
    g = sel.group
    return RowSelection(g, tuple(g.flat(g.add(r, t)) for r in sel.rows))


def dilate_rows(sel: RowSelection, c: int | Iterable[int]) -> RowSelection:
    g = sel.group
    cs = (int(c),) * g.ndim if isinstance(c, (int, np.integer)) else tuple(int(x) for x in c)
    for ck, dk in zip(cs, g.factors):
        if math.gcd(ck, dk) != 1:
            raise ValueError(f"dilation factor {ck} is not coprime to {dk}")
    return RowSelection(g, tuple(g.flat(g.scale(r, cs)) for r in sel.rows))


def complement_rows(sel: RowSelection) -> RowSelection:
    rest = sorted(set(sel.group.elements()) - set(sel.rows))
    if not rest:
        raise ValueError("the complement of the full group is empty")
    return RowSelection(sel.group, tuple(rest))


def transform_rows(sel: RowSelection, op: str, arg=None) -> RowSelection:
    """Apply ``"translate"``, ``"dilate"`` or ``"complement"`` to a row selection."""
    if op == "translate":
        return translate_rows(sel, arg)
    if op == "dilate":
        return dilate_rows(sel, arg)
    if op == "complement":
        return complement_rows(sel)
    raise ValueError(f"unknown transform {op!r}")


def annihilator_subgroup(d: int, delta: tuple[int, int]) -> list[tuple[int, int]]:
    """All ``(s, p)`` in Z_d x Z_d with ``delta[0] * s + delta[1] * p = 0 (mod d)``."""
    a, b = delta
    return [(s, p) for s, p in product(range(d), repeat=2) if (a * s + b * p) % d == 0]


def find_singular_witness(d: int, rows: Iterable[tuple[int, int]], tol: float = RANK_TOL,
                          exhaustive_limit: int = 4) -> tuple[tuple[int, int], ...] | None:
    """Columns of ``F_d (x) F_d`` making the ``L x L`` block on ``rows`` singular.

    Takes the first two rows, forms the annihilator of their difference, and
    picks ``L`` of its elements: on those columns the two rows coincide.  If
    that does not yield a numerically singular block, an exhaustive search is
    tried for ``L <= exhaustive_limit``.
    """
    g = make_group((d, d))
    pts = sorted({g.reduce(r) for r in rows})
    L = len(pts)
    if not 1 < L <= d:
        raise ValueError(f"need 1 < L <= d, got L={L}, d={d}")
    F = fourier_matrix(g)
    row_idx = [g.flat(p) for p in pts]

    (k1, l1), (k2, l2) = pts[0], pts[1]
    H = annihilator_subgroup(d, ((k1 - k2) % d, (l1 - l2) % d))
    if len(H) >= L:
        cols = tuple(H[:L])
        block = submatrix(F, row_idx, [g.flat(c) for c in cols])
        if numerical_rank(block, tol) < L:
            return cols
    if L <= exhaustive_limit:
        for cols in combinations(g.elements(), L):
            if numerical_rank(submatrix(F, row_idx, cols), tol) < L:
                return tuple(g.multi(c) for c in cols)
    return None
