"""Convolution operators held by their frequency symbol.

A circular convolution ``A f = a * f`` on a finite abelian group is diagonal
in the Fourier basis, ``A = F^* diag(a_hat) F``, where ``a_hat`` is the
unnormalized Fourier transform of the kernel.  Everything here works on
``a_hat`` directly; the spatial kernel is optional.
"""

from __future__ import annotations

import warnings
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .groups import FiniteGroup, IndexLike, fourier_matrix, make_group

#: absolute tolerance for treating two eigenvalues as equal
GROUP_TOL = 1e-8


class PartitionAmbiguityWarning(UserWarning):
    """Eigenvalue grouping chained values farther apart than the tolerance suggests."""


@dataclass(frozen=True, eq=False)
class Kernel:
    group: FiniteGroup
    symbol: np.ndarray
    origin: str = "frequency"

    def __post_init__(self) -> None:
        sym = np.array(self.symbol, dtype=complex).reshape(-1)
        if sym.size != self.group.order:
            raise ValueError(f"symbol has length {sym.size}, group order is {self.group.order}")
        if not np.all(np.isfinite(sym)):
            raise ValueError("symbol has non-finite entries")
        if self.origin not in ("frequency", "space"):
            raise ValueError(f"unknown origin {self.origin!r}")
        sym.flags.writeable = False
        object.__setattr__(self, "symbol", sym)

    @property
    def order(self) -> int:
        return self.group.order

    def adjoint(self) -> Kernel:
        """Kernel of ``A^*`` (conjugated symbol)."""
        return Kernel(self.group, np.conj(self.symbol), self.origin)

    def matrix(self) -> np.ndarray:
        """Dense ``A`` in the spatial basis; for small groups and tests."""
        F = fourier_matrix(self.group).entries
        return F.conj().T @ (self.symbol[:, None] * F)

    def __repr__(self) -> str:
        return f"Kernel({self.group!r}, origin={self.origin!r})"


def kernel_from_symbol(group: FiniteGroup | Sequence[int] | int, symbol) -> Kernel:
    if not isinstance(group, FiniteGroup):
        group = make_group(group)
    return Kernel(group, symbol, "frequency")


def kernel_from_space(group: FiniteGroup | Sequence[int] | int, a) -> Kernel:
    """Kernel from its spatial convolution weights ``a`` (flat order)."""
    if not isinstance(group, FiniteGroup):
        group = make_group(group)
    a = np.asarray(a, dtype=complex).reshape(-1)
    if a.size != group.order:
        raise ValueError(f"kernel has length {a.size}, group order is {group.order}")
    F = fourier_matrix(group).entries
    return Kernel(group, np.sqrt(group.order) * (F @ a), "space")


@dataclass(frozen=True, eq=False)
class LevelPartition:
    """Level sets of a symbol, ordered by their smallest member."""

    classes: tuple[tuple[int, ...], ...]
    values: np.ndarray
    tol: float
    ambiguous: bool = False
    labels: np.ndarray = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.labels is None:
            n = sum(len(c) for c in self.classes)
            labels = np.empty(n, dtype=np.intp)
            for k, cls in enumerate(self.classes):
                labels[list(cls)] = k
            object.__setattr__(self, "labels", labels)

    @property
    def count(self) -> int:
        """Number of distinct eigenvalues (``N_A``)."""
        return len(self.classes)

    @property
    def sizes(self) -> list[int]:
        return [len(c) for c in self.classes]

    @property
    def max_size(self) -> int:
        """Largest geometric multiplicity (``M_A``)."""
        return max(self.sizes)

    def class_of(self, i: int) -> int:
        return int(self.labels[i])

    def as_sets(self) -> set[frozenset[int]]:
        return {frozenset(c) for c in self.classes}


def partition_values(values, tol: float = GROUP_TOL) -> LevelPartition:
    """Group entries of ``values`` whose pairwise distance chains within ``tol``.

    Single-linkage: two entries share a class when they are joined by a chain
    of steps of length ``<= tol``.  The result is flagged ambiguous when a
    class spans more than ``10 * tol`` or two class means come within ``tol``.
    """
    values = np.asarray(values, dtype=complex).reshape(-1)
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    if not np.all(np.isfinite(values)):
        raise ValueError("values must be finite")
    uniq, inverse = np.unique(values, return_inverse=True)
    pts = np.column_stack([uniq.real, uniq.imag])
    if len(uniq) > 1 and tol > 0:
        pairs = cKDTree(pts).query_pairs(tol, output_type="ndarray")
    else:
        pairs = np.zeros((0, 2), dtype=np.intp)
    graph = coo_matrix(
        (np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(len(uniq), len(uniq))
    )
    _, comp = connected_components(graph, directed=False)
    member_comp = comp[inverse.reshape(-1)]

    # relabel components by smallest member index
    order = np.full(comp.max() + 1, values.size, dtype=np.intp)
    np.minimum.at(order, member_comp, np.arange(values.size))
    rank = np.argsort(np.argsort(order))
    labels = rank[member_comp]
    classes = tuple(tuple(np.flatnonzero(labels == k).tolist()) for k in range(rank.size))
    means = np.array([values[list(c)].mean() for c in classes])

    ambiguous = False
    for k, cls in enumerate(classes):
        u = np.unique(values[list(cls)])
        if u.size > 1:
            spread = np.abs(u[:, None] - u[None, :]).max() if u.size <= 2048 else 2 * np.abs(u - means[k]).max()
            if spread > 10 * tol:
                ambiguous = True
                break
    if not ambiguous and len(means) > 1 and tol > 0:
        close = cKDTree(np.column_stack([means.real, means.imag])).query_pairs(tol)
        ambiguous = bool(close)
    if ambiguous:
        warnings.warn("eigenvalue grouping is tolerance-ambiguous", PartitionAmbiguityWarning, stacklevel=2)
    return LevelPartition(classes, means, float(tol), ambiguous, labels)


def level_partition(kernel: Kernel, tol: float = GROUP_TOL) -> LevelPartition:
    """Level sets of ``kernel.symbol`` (eigenspaces of ``A`` in frequency coordinates)."""
    return partition_values(kernel.symbol, tol)


@dataclass(frozen=True)
class EigenProjection:
    class_index: int
    indices: tuple[int, ...]


def eigenprojections(partition: LevelPartition) -> list[EigenProjection]:
    return [EigenProjection(k, cls) for k, cls in enumerate(partition.classes)]


def project(kernel: Kernel, p: EigenProjection, v) -> np.ndarray:
    """Zero the frequency coordinates of ``v`` outside ``p.indices``."""
    v = np.asarray(v, dtype=complex).reshape(-1)
    if v.size != kernel.order:
        raise ValueError("vector length does not match the group order")
    out = np.zeros_like(v)
    idx = list(p.indices)
    out[idx] = v[idx]
    return out


def apply_operator(kernel: Kernel, f, power: int = 1) -> np.ndarray:
    """``A^power f`` via the Fourier basis."""
    if power < 0:
        raise ValueError("power must be nonnegative")
    f = np.asarray(f, dtype=complex).reshape(-1)
    if f.size != kernel.order:
        raise ValueError(f"vector has length {f.size}, group order is {kernel.order}")
    if power == 0:
        return f.copy()
    F = fourier_matrix(kernel.group).entries
    return F.conj().T @ (kernel.symbol**power * (F @ f))


def annihilator_degree(
    kernel: Kernel,
    i: IndexLike,
    tol: float = GROUP_TOL,
    partition: LevelPartition | None = None,
) -> int:
    """Degree of the minimal polynomial ``p`` with ``p(A) e_i = 0``.

    Equals the number of distinct eigenvalues met on the frequency support of
    ``F e_i``.
    """
    col = fourier_matrix(kernel.group).entries[:, kernel.group.flat(i)]
    if partition is None:
        partition = level_partition(kernel, tol)
    support = np.flatnonzero(np.abs(col) > 1e-12)
    return int(np.unique(partition.labels[support]).size)


def annihilator_degrees(kernel: Kernel, omega: Iterable[IndexLike], tol: float = GROUP_TOL,
                        partition: LevelPartition | None = None) -> list[int]:
    if partition is None:
        partition = level_partition(kernel, tol)
    return [annihilator_degree(kernel, i, tol, partition) for i in omega]


# -- kernel generators -----------------------------------------------------------


def separated_values(n: int, rng: np.random.Generator, radius: tuple[float, float] = (0.85, 1.0)) -> np.ndarray:
    """``n`` random complex numbers, well separated, inside the unit disc.

    Angles are a shuffled, jittered equispaced grid, so neighbours stay at
    least ``0.4 * 2 pi / n`` apart in angle.  Keeping the values near the unit
    circle keeps the power (Vandermonde) rows reasonably conditioned.
    """
    if n < 1:
        return np.zeros(0, dtype=complex)
    slots = rng.permutation(n) + rng.uniform(-0.3, 0.3, size=n)
    r = rng.uniform(*radius, size=n)
    return r * np.exp(2j * np.pi * slots / n)


def kernel_from_partition(group: FiniteGroup | Sequence[int] | int, classes: Iterable[Iterable[int]],
                          rng: np.random.Generator | int | None = None, values=None) -> Kernel:
    """Kernel whose level sets are exactly ``classes`` (a partition of the group)."""
    if not isinstance(group, FiniteGroup):
        group = make_group(group)
    classes = [list(c) for c in classes]
    seen = sorted(i for c in classes for i in c)
    if seen != list(range(group.order)):
        raise ValueError("classes must partition the group indices")
    if values is None:
        values = separated_values(len(classes), np.random.default_rng(rng))
    symbol = np.empty(group.order, dtype=complex)
    for cls, v in zip(classes, values):
        symbol[cls] = v
    return Kernel(group, symbol)


def random_partition(order: int, max_size: int, rng: np.random.Generator,
                     forced: Iterable[int] | None = None) -> list[list[int]]:
    """Random partition of ``range(order)`` whose largest class has exactly ``max_size`` members.

    ``forced`` pins one class (of size ``max_size``) to the given indices.
    """
    if not 1 <= max_size <= order:
        raise ValueError("max_size out of range")
    rest = [int(i) for i in rng.permutation(order)]
    if forced is not None:
        first = sorted(int(i) for i in forced)
        if len(first) != max_size:
            raise ValueError("forced class must have max_size members")
        rest = [i for i in rest if i not in set(first)]
    else:
        first, rest = sorted(rest[:max_size]), rest[max_size:]
    classes = [first]
    while rest:
        size = int(rng.integers(1, min(max_size, len(rest)) + 1))
        classes.append(sorted(rest[:size]))
        rest = rest[size:]
    return classes


def random_slice_partition(d: int, m: int, max_size: int, rng: np.random.Generator,
                           forced: Iterable[int] | None = None, forced_slice: int = 0) -> list[list[int]]:
    """Random partition of ``Z_d`` refining the slices ``{k + J s : s in Z_m}`` (``J = d / m``).

    Every slice is split with classes of size at most ``max_size`` and slice
    ``forced_slice`` contains a class of exactly ``max_size`` members.  With
    ``forced`` (positions ``s`` inside the slice) that class is pinned.
    """
    if m < 1 or d % m:
        raise ValueError(f"m={m} must divide d={d}")
    if not 1 <= max_size <= m:
        raise ValueError("max_size out of range")
    J = d // m
    if not 0 <= forced_slice < J:
        raise ValueError("forced_slice out of range")
    classes = []
    for k in range(J):
        if k == forced_slice:
            local = random_partition(m, max_size, rng, forced)
        else:
            local = random_partition(m, int(rng.integers(1, max_size + 1)), rng)
        classes.extend(sorted(k + J * s for s in cls) for cls in local)
    return classes
