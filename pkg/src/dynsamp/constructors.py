"""Builders for universal sampling plans and an exhaustive minimal-set search."""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations, islice

import numpy as np

from . import _accel
from .frames import (
    PeriodicPlan,
    SamplingPlan,
    bind,
    frame_test_direct,
)
from .groups import RANK_FLOOR, RANK_TOL, FiniteGroup, fourier_matrix, make_group
from .spark import RowSelection, divisors, is_full_spark_rows, is_uniformly_distributed, spark_witness
from .spectral import GROUP_TOL, Kernel, level_partition

SEARCH_CAP_1D = 64
SEARCH_CAP_2D = 36


class ConstructionError(ValueError):
    """A recipe precondition failed; names the parameter and, if any, the offending divisor."""

    def __init__(self, message: str, parameter: str | None = None, divisor: int | None = None,
                 witness: Sequence[int] | None = None):
        super().__init__(message)
        self.parameter = parameter
        self.divisor = divisor
        self.witness = None if witness is None else tuple(witness)

    def to_dict(self) -> dict:
        out = {"error": str(self), "parameter": self.parameter, "divisor": self.divisor}
        if self.witness is not None:
            out["witness"] = list(self.witness)
        return out


@dataclass(frozen=True)
class ConstructionRecipe:
    kind: str
    params: dict = field(default_factory=dict)
    claimed_depth: int | None = None


def _require_coprime(value: int, d: int, name: str) -> None:
    g = math.gcd(abs(int(value)), d)
    if g != 1:
        raise ConstructionError(f"gcd({name}={abs(int(value))}, {d}) = {g} must be 1", name, g)


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % p for p in range(2, math.isqrt(n) + 1))


def _prime_power_base(n: int) -> int | None:
    for p in range(2, n + 1):
        if n % p == 0:
            while n % p == 0:
                n //= p
            return p if n == 1 else None
    return None


# -- one dimension ----------------------------------------------------------------


def consecutive_set(d: int, L: int) -> SamplingPlan:
    """``{0, ..., L-1}``: universal for every kernel whose largest multiplicity is ``L``."""
    if not 1 <= L <= d:
        raise ConstructionError(f"need 1 <= L <= d, got L={L}, d={d}", "L")
    recipe = ConstructionRecipe("consecutive", {"d": d, "L": L})
    return SamplingPlan.make(d, range(L), None, recipe)


def gcd_pair_set(d: int, i1: int, i2: int) -> SamplingPlan:
    """``{i1, i2}``; universal for multiplicity two iff ``gcd(|i1 - i2|, d) = 1``."""
    _require_coprime(abs(i1 - i2), d, "i1-i2")
    recipe = ConstructionRecipe("gcd-pair", {"d": d, "i1": i1, "i2": i2})
    return SamplingPlan.make(d, [i1 % d, i2 % d], None, recipe)


def prime_any_set(d: int, omega: Iterable[int]) -> SamplingPlan:
    """Any set when ``d`` is prime (every square block of ``F_d`` is invertible)."""
    if not _is_prime(d):
        raise ConstructionError(f"d={d} is not prime", "d")
    omega = sorted({int(i) % d for i in omega})
    recipe = ConstructionRecipe("prime-any", {"d": d, "omega": omega})
    return SamplingPlan.make(d, omega, None, recipe)


def prime_power_uniform_set(d: int, omega: Iterable[int]) -> SamplingPlan:
    """A set uniformly distributed over the divisors of a prime power ``d``."""
    if _prime_power_base(d) is None:
        raise ConstructionError(f"d={d} is not a prime power", "d")
    omega = sorted({int(i) % d for i in omega})
    if not is_uniformly_distributed(d, omega):
        for m in divisors(d):
            counts = np.bincount(np.asarray(omega) % m, minlength=m)
            if counts.max() - counts.min() > 1:
                raise ConstructionError(f"omega is not uniformly distributed modulo {m}", "omega", m)
    recipe = ConstructionRecipe("prime-power-uniform", {"d": d, "omega": omega})
    return SamplingPlan.make(d, omega, None, recipe)


def periodic_W_set(d: int, m: int, W: Iterable[int]) -> PeriodicPlan:
    """``{m Z_d + r : r in W}`` at depth ``m - 1``; requires ``(F_m)_W`` full spark."""
    if m <= 1:
        raise ConstructionError("the period m must exceed 1", "m")
    if d % m:
        raise ConstructionError(f"m={m} does not divide d={d}", "m", math.gcd(d, m))
    W = sorted({int(r) for r in W})
    if not W or any(not 0 <= r < m for r in W):
        raise ConstructionError(f"W must be a nonempty subset of Z_{m}", "W")
    sel = RowSelection.of(m, W)
    if not is_full_spark_rows(sel):
        _, witness = spark_witness(sel.matrix())
        raise ConstructionError(f"(F_{m})_W is not full spark", "W", witness=witness)
    return PeriodicPlan(d, m, tuple(W))


# -- two dimensions ---------------------------------------------------------------


def _sym_depth(kind: str, n: int) -> int:
    if kind == "linf":
        return (n - 1) // 2
    if kind in ("quadrantal", "diagonal"):
        return (n + 1) ** 2 // 4 - 1
    if kind == "octagonal":
        return (n + 1) * (n + 3) // 8 - 1
    raise ConstructionError(f"unknown symmetry {kind!r}", "symmetry")


def _sym_points(n: int, kind: str, params: Sequence[int], variant: str) -> list[tuple[int, int]]:
    """Sensor pattern for a symmetry class over Z_n x Z_n (gcd checks done here)."""
    if n % 2 == 0:
        raise ConstructionError(f"symmetric constructions need odd size, got {n}", "d", 2)
    if variant not in ("row", "col"):
        raise ConstructionError(f"variant must be 'row' or 'col', got {variant!r}", "variant")
    p = [int(x) for x in params]
    if kind == "linf":
        pts = {(a, b) for a in (0, 1) for b in range(n)} | {(a, b) for a in range(n) for b in (0, 1)}
    elif kind == "quadrantal":
        if len(p) != 4:
            raise ConstructionError("quadrantal needs (i1, i2, j1, j2)", "params")
        i1, i2, j1, j2 = p
        _require_coprime(abs(i1 - i2), n, "i1-i2")
        _require_coprime(abs(j1 - j2), n, "j1-j2")
        pts = {(a, b) for a in (i1, i2) for b in (j1, j2)}
    elif kind == "diagonal":
        if len(p) != 2:
            raise ConstructionError("diagonal needs (start, step)", "params")
        start, step = p
        _require_coprime(step, n, "i2" if variant == "row" else "j2")
        line = [start + k * step for k in range(4)]
        pts = {(a, 0) for a in line} if variant == "row" else {(0, b) for b in line}
    elif kind == "octagonal":
        if len(p) != 4:
            raise ConstructionError("octagonal needs (i1, i2, j1, j2)", "params")
        i1, i2, j1, j2 = p
        if variant == "row":
            _require_coprime(abs(i1 - i2), n, "i1-i2")
            _require_coprime(j2, n, "j2")
            pts = {(a, b) for a in (i1, i2) for b in (j1 + k * j2 for k in range(4))}
        else:
            _require_coprime(abs(j1 - j2), n, "j1-j2")
            _require_coprime(i2, n, "i2")
            pts = {(a, b) for a in (i1 + k * i2 for k in range(4)) for b in (j1, j2)}
    else:
        raise ConstructionError(f"unknown symmetry {kind!r}", "symmetry")
    return sorted({(a % n, b % n) for a, b in pts})


def sym2d_set(d: int, symmetry: str, params: Sequence[int] = (), variant: str = "row") -> SamplingPlan:
    """Sensor set and uniform depth for a kernel with the given frequency symmetry.

    ``params``: none for ``linf``; ``(i1, i2, j1, j2)`` for ``quadrantal`` and
    ``octagonal``; ``(start, step)`` for ``diagonal``.  ``variant="col"``
    selects the transposed pattern for ``diagonal`` and ``octagonal``.
    """
    pts = _sym_points(d, symmetry, params, variant)
    depth = _sym_depth(symmetry, d)
    recipe = ConstructionRecipe(f"sym-{symmetry}", {"d": d, "params": list(params), "variant": variant}, depth)
    return SamplingPlan.make((d, d), pts, depth, recipe)


@dataclass(frozen=True)
class PeriodicPlan2D:
    """``omega = {(r1 + m a, r2 + m b) : (r1, r2) in W}`` on Z_d x Z_d."""

    d: int
    m: int
    W: tuple[tuple[int, int], ...]
    depth: int | None = None
    recipe: ConstructionRecipe | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.m <= 1 or self.d % self.m:
            raise ValueError(f"m={self.m} must be a divisor of d={self.d} larger than 1")
        W = tuple(sorted({(int(a) % self.m, int(b) % self.m) for a, b in self.W}))
        if not W:
            raise ValueError("W must be nonempty")
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "depth", self.m**2 - 1 if self.depth is None else int(self.depth))

    @property
    def J(self) -> int:
        return self.d // self.m

    @property
    def group(self) -> FiniteGroup:
        return make_group((self.d, self.d))

    @property
    def omega(self) -> list[tuple[int, int]]:
        J, m = self.J, self.m
        return sorted((r1 + m * a, r2 + m * b) for r1, r2 in self.W for a in range(J) for b in range(J))

    def induced_plan(self) -> SamplingPlan:
        return SamplingPlan.make((self.d, self.d), self.omega, self.depth, self.recipe)


def sym2d_periodic_set(d: int, m: int, symmetry: str, params: Sequence[int] = (),
                       variant: str = "row") -> PeriodicPlan2D:
    """Periodic version of :func:`sym2d_set`: the pattern lives in Z_m x Z_m, depth ``m^2 - 1``."""
    if d % 2 == 0:
        raise ConstructionError(f"symmetric constructions need odd d, got {d}", "d", 2)
    if m <= 1 or d % m:
        raise ConstructionError(f"m={m} must be a divisor of d={d} larger than 1", "m")
    W = _sym_points(m, symmetry, params, variant)
    recipe = ConstructionRecipe(f"sym-{symmetry}-periodic",
                                {"d": d, "m": m, "params": list(params), "variant": variant}, m * m - 1)
    return PeriodicPlan2D(d, m, tuple(W), m * m - 1, recipe)


# -- exhaustive search ------------------------------------------------------------


def _scan_size(F, classes, n: int, size: int, tol: float, workers: int, backend: str | None) -> list[tuple]:
    chunks = []
    gen = combinations(range(n), size)
    while True:
        block = list(islice(gen, _accel.CHUNK))
        if not block:
            break
        chunks.append(block)

    def run(block):
        mask = _accel.admissible_mask(F, classes, np.asarray(block), tol, RANK_FLOOR, backend)
        return [c for c, ok in zip(block, mask) if ok]

    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, chunks))
    else:
        parts = [run(b) for b in chunks]
    return [c for part in parts for c in part]


def search_minimal(kernel: Kernel, max_size: int | None = None, tol: float = RANK_TOL,
                   group_tol: float = GROUP_TOL, cap: int | None = None, verify_fraction: float = 0.1,
                   seed: int = 0, workers: int | None = None, backend: str | None = None) -> list[tuple[int, ...]]:
    """All admissible sensor sets of the smallest admissible size, in ascending lexicographic order.

    Sizes from the largest multiplicity up to ``max_size`` are tried in turn.
    A random fraction of the hits is re-checked with :func:`frame_test_direct`
    at depths ``r_i - 1``.
    """
    g = kernel.group
    if cap is None:
        cap = SEARCH_CAP_1D if g.ndim == 1 else SEARCH_CAP_2D
    if g.order > cap:
        raise ValueError(f"group order {g.order} exceeds the search cap {cap}")
    n = g.order
    part = level_partition(kernel, group_tol)
    max_size = n if max_size is None else min(int(max_size), n)
    workers = _accel.worker_count() if workers is None else max(1, int(workers))
    F = fourier_matrix(g).entries
    rng = np.random.default_rng(seed)
    for size in range(part.max_size, max_size + 1):
        hits = _scan_size(F, part.classes, n, size, tol, workers, backend)
        if not hits:
            continue
        n_check = max(1, int(round(verify_fraction * len(hits)))) if verify_fraction > 0 else 0
        for j in rng.choice(len(hits), size=min(n_check, len(hits)), replace=False):
            plan = bind(SamplingPlan.make(g, hits[j]), kernel, partition=part)
            if not frame_test_direct(kernel, plan, tol, group_tol).is_frame:
                raise RuntimeError(f"direct test rejects search hit {hits[j]}")
        return hits
    return []
