"""Frame tests for iterated samples ``{A^s e_i : 0 <= s <= l_i, i in omega}``."""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING

import numpy as np

from .groups import (
    RANK_TOL,
    FiniteGroup,
    IndexLike,
    fourier_matrix,
    make_group,
    numerical_rank,
    singular_values,
)
from .spectral import GROUP_TOL, Kernel, LevelPartition, annihilator_degrees, level_partition, partition_values

if TYPE_CHECKING:
    from .constructors import ConstructionRecipe

FRAME = "frame"
NOT_FRAME = "not-frame"
NEVER_FRAME = "never-frame"


@dataclass(frozen=True)
class SamplingPlan:
    """Sensor locations ``omega`` (flat indices, ascending) and per-sensor depths.

    ``depths=None`` is a placeholder meaning "one less than the annihilator
    degree", resolved against a kernel by :func:`bind`.
    """

    group: FiniteGroup
    omega: tuple[int, ...]
    depths: tuple[int, ...] | None = None
    recipe: ConstructionRecipe | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        omega = tuple(int(i) for i in self.omega)
        if not omega:
            raise ValueError("omega must be nonempty")
        if list(omega) != sorted(set(omega)):
            raise ValueError("omega must be strictly ascending flat indices")
        for i in omega:
            self.group.flat(i)
        object.__setattr__(self, "omega", omega)
        if self.depths is not None:
            depths = tuple(int(x) for x in self.depths)
            if len(depths) != len(omega):
                raise ValueError("need exactly one depth per sensor")
            if any(x < 0 for x in depths):
                raise ValueError("depths must be nonnegative")
            object.__setattr__(self, "depths", depths)

    @classmethod
    def make(cls, group: FiniteGroup | int | Sequence[int], omega: Iterable[IndexLike],
             depths: int | Mapping | Sequence[int] | None = None, recipe=None) -> SamplingPlan:
        """Build a plan from any index form; ``depths`` may be an int, a map or a sequence."""
        if not isinstance(group, FiniteGroup):
            group = make_group(group)
        items = list(omega)
        flat = [group.flat(i) for i in items]
        order = sorted(set(flat))
        if depths is None:
            d = None
        elif isinstance(depths, (int, np.integer)):
            d = (int(depths),) * len(order)
        elif isinstance(depths, Mapping):
            lookup = {group.flat(k): int(v) for k, v in depths.items()}
            if set(lookup) != set(order):
                raise ValueError("depth keys must match omega")
            d = tuple(lookup[i] for i in order)
        else:
            seq = list(depths)
            if len(seq) != len(flat):
                raise ValueError("need exactly one depth per sensor")
            lookup = dict(zip(flat, seq))
            d = tuple(int(lookup[i]) for i in order)
        return cls(group, tuple(order), d, recipe)

    @property
    def resolved(self) -> bool:
        return self.depths is not None

    @property
    def total_samples(self) -> int:
        if self.depths is None:
            raise ValueError("depths are unresolved; bind the plan to a kernel first")
        return sum(l + 1 for l in self.depths)

    def points(self) -> list[tuple[int, ...]]:
        return [self.group.multi(i) for i in self.omega]

    def depth_map(self) -> dict[int, int]:
        if self.depths is None:
            raise ValueError("depths are unresolved")
        return dict(zip(self.omega, self.depths))

    def with_depths(self, depths) -> SamplingPlan:
        return SamplingPlan.make(self.group, self.omega, depths, self.recipe)

    def translate(self, t: IndexLike) -> SamplingPlan:
        g = self.group
        moved = [g.flat(g.add(i, t)) for i in self.omega]
        d = None if self.depths is None else list(self.depths)
        return SamplingPlan.make(g, moved, d, self.recipe)


@dataclass
class FrameReport:
    verdict: str
    rank: int
    required_rank: int
    min_cardinality_bound: int
    lower_frame_bound: float | None = None
    upper_frame_bound: float | None = None
    failing_class: int | None = None
    failing_slice: int | None = None
    method: str = "direct"
    kernel_role: str = "original"
    ambiguous: bool = False
    notes: list[str] = field(default_factory=list)

    @property
    def is_frame(self) -> bool:
        return self.verdict == FRAME

    @property
    def condition_number(self) -> float | None:
        """``sqrt(B / A)``: ratio of extreme singular values of the analysis matrix."""
        if self.lower_frame_bound is None or self.upper_frame_bound is None:
            return None
        return float(np.sqrt(self.upper_frame_bound / self.lower_frame_bound))


def _check_plan(kernel: Kernel, plan: SamplingPlan) -> None:
    if plan.group != kernel.group:
        raise ValueError(f"plan is over {plan.group!r} but the kernel is over {kernel.group!r}")


def bind(plan: SamplingPlan, kernel: Kernel, tighten: bool = False, group_tol: float = GROUP_TOL,
         partition: LevelPartition | None = None) -> SamplingPlan:
    """Resolve placeholder depths to ``r_i - 1``; with ``tighten`` also cap given depths there."""
    _check_plan(kernel, plan)
    if plan.depths is not None and not tighten:
        return plan
    r = annihilator_degrees(kernel, plan.omega, group_tol, partition)
    sat = [ri - 1 for ri in r]
    if plan.depths is None:
        depths = sat
    else:
        depths = [min(l, s) for l, s in zip(plan.depths, sat)]
    return replace(plan, depths=tuple(depths))


def analysis_rows(kernel: Kernel, pairs: Sequence[tuple[int, int]]) -> np.ndarray:
    """Rows ``(A^t e_i)^*`` in frequency coordinates, i.e. ``conj(a_hat^t * F e_i)``, one per ``(i, t)``."""
    F = fourier_matrix(kernel.group).entries
    sensors = np.array([p[0] for p in pairs], dtype=np.intp)
    times = np.array([p[1] for p in pairs], dtype=np.int64)
    return np.conj(kernel.symbol[None, :] ** times[:, None] * F[:, sensors].T)


def analysis_matrix(kernel: Kernel, plan: SamplingPlan, domain: str = "frequency") -> np.ndarray:
    """Rows ``(A^s e_i)^*`` for ``i`` in omega, ``s = 0..l_i`` (sensor-major, then time).

    In the frequency domain the rows are ``(diag(a_hat)^s F e_i)^*``; the two
    matrices differ by the unitary ``F`` on the right, so ranks and singular
    values agree.
    """
    _check_plan(kernel, plan)
    if plan.depths is None:
        raise ValueError("depths are unresolved; bind the plan to a kernel first")
    pairs = [(i, s) for i, l in zip(plan.omega, plan.depths) for s in range(l + 1)]
    M = analysis_rows(kernel, pairs)
    if domain == "frequency":
        return M
    if domain == "space":
        return M @ fourier_matrix(kernel.group).entries
    raise ValueError(f"unknown domain {domain!r}")


def _row_normalized(M: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(M, axis=1)
    norms[norms == 0] = 1.0
    return M / norms[:, None]


def _direct_rank(kernel: Kernel, plan: SamplingPlan, tol: float) -> tuple[int, np.ndarray]:
    M = analysis_matrix(kernel, plan)
    # row scaling leaves the rank unchanged and tames powers of small eigenvalues
    rank = numerical_rank(_row_normalized(M), tol)
    return rank, M


def frame_test_direct(kernel: Kernel, plan: SamplingPlan, tol: float = RANK_TOL,
                      group_tol: float = GROUP_TOL) -> FrameReport:
    """Decide the frame property from the rank of the full analysis matrix."""
    _check_plan(kernel, plan)
    part = level_partition(kernel, group_tol)
    plan = bind(plan, kernel, partition=part)
    n = kernel.order
    rank, M = _direct_rank(kernel, plan, tol)
    report = FrameReport(NOT_FRAME, rank, n, part.max_size, method="direct", ambiguous=part.ambiguous)
    if rank == n:
        s = singular_values(M)
        report.verdict = FRAME
        report.upper_frame_bound = float(s[0] ** 2)
        report.lower_frame_bound = float(s[n - 1] ** 2)
        return report
    saturated = bind(replace(plan, depths=None), kernel, partition=part)
    if all(l >= s for l, s in zip(plan.depths, saturated.depths)):
        report.verdict = NEVER_FRAME
    else:
        sat_rank, _ = _direct_rank(kernel, saturated, tol)
        report.verdict = NEVER_FRAME if sat_rank < n else NOT_FRAME
        if sat_rank == n:
            report.notes.append("depths below the annihilator degree; deeper sampling gives a frame")
    return report


def smallest_uniform_depth(kernel: Kernel, plan: SamplingPlan, tol: float = RANK_TOL,
                           group_tol: float = GROUP_TOL) -> int | None:
    """Smallest ``l`` such that depth ``l`` at every sensor gives a frame, or ``None`` if none does.

    The sample span only grows with depth, so a bisection over
    ``0..max(r_i) - 1`` suffices.  This is a property of the given kernel; it
    says nothing about other kernels of the same class.
    """
    _check_plan(kernel, plan)
    part = level_partition(kernel, group_tol)
    if class_blocks_ok(kernel, plan.omega, part, tol) is not None:
        return None
    top = max(annihilator_degrees(kernel, plan.omega, group_tol, part)) - 1
    lo, hi = 0, top
    while lo < hi:
        mid = (lo + hi) // 2
        rank, _ = _direct_rank(kernel, plan.with_depths(mid), tol)
        if rank == kernel.order:
            hi = mid
        else:
            lo = mid + 1
    return lo


def class_block_ranks(kernel: Kernel, omega: Sequence[int], partition: LevelPartition,
                      tol: float = RANK_TOL) -> list[int]:
    """Rank of ``F[class, omega]`` for every level class."""
    F = fourier_matrix(kernel.group).entries
    cols = list(omega)
    return [numerical_rank(F[np.ix_(list(cls), cols)], tol) for cls in partition.classes]


def class_blocks_ok(kernel: Kernel, omega: Sequence[int], partition: LevelPartition,
                    tol: float = RANK_TOL) -> int | None:
    """Index of the first level class whose block ``F[class, omega]`` lacks full row rank."""
    F = fourier_matrix(kernel.group).entries
    cols = list(omega)
    for k, cls in enumerate(partition.classes):
        if len(cls) > len(cols) or numerical_rank(F[np.ix_(list(cls), cols)], tol) < len(cls):
            return k
    return None


def frame_test_projection(kernel: Kernel, plan: SamplingPlan, tol: float = RANK_TOL,
                          group_tol: float = GROUP_TOL) -> FrameReport:
    """Decide the frame property class by class on the projected Fourier columns."""
    _check_plan(kernel, plan)
    part = level_partition(kernel, group_tol)
    n = kernel.order
    failing = class_blocks_ok(kernel, plan.omega, part, tol)
    report = FrameReport(NEVER_FRAME, 0, n, part.max_size, method="projection", ambiguous=part.ambiguous)
    if failing is not None:
        report.failing_class = failing
        # rank of the saturated span, which splits over the level classes
        report.rank = sum(class_block_ranks(kernel, plan.omega, part, tol))
        report.notes.append(f"level class {failing} is not spanned by the projected columns")
        return report
    r = annihilator_degrees(kernel, plan.omega, group_tol, part)
    depths = plan.depths if plan.depths is not None else tuple(ri - 1 for ri in r)
    if all(l >= ri - 1 for l, ri in zip(depths, r)):
        report.verdict = FRAME
        report.rank = n
        return report
    direct = frame_test_direct(kernel, plan, tol, group_tol)
    report.verdict = direct.verdict
    report.rank = direct.rank
    report.lower_frame_bound = direct.lower_frame_bound
    report.upper_frame_bound = direct.upper_frame_bound
    report.notes.append("depths below the annihilator degree; verdict taken from the direct test")
    return report


def never_frame_test(kernel: Kernel, omega: Iterable[IndexLike], tol: float = RANK_TOL,
                     group_tol: float = GROUP_TOL) -> bool:
    """True when no choice of depths makes the samples at ``omega`` a frame."""
    omega = kernel.group.index_set(omega)
    if not omega:
        raise ValueError("omega must be nonempty")
    part = level_partition(kernel, group_tol)
    return class_blocks_ok(kernel, omega, part, tol) is not None


def min_sensor_bound(kernel: Kernel, group_tol: float = GROUP_TOL) -> int:
    """Largest geometric multiplicity: no admissible set is smaller."""
    return level_partition(kernel, group_tol).max_size


def compare_reports(a: FrameReport, b: FrameReport) -> bool:
    """Whether two reports disagree in a way that is not explained by tolerance ambiguity."""
    return a.verdict != b.verdict and not (a.ambiguous or b.ambiguous)


# -- unions of periodic sets ------------------------------------------------------


@dataclass(frozen=True)
class PeriodicPlan:
    """``omega = {m Z_d + r : r in W}`` on a cyclic group with uniform depth."""

    d: int
    m: int
    W: tuple[int, ...]
    depth: int | None = None

    def __post_init__(self) -> None:
        d, m = int(self.d), int(self.m)
        if m <= 1:
            raise ValueError("the period m must exceed 1")
        if d % m:
            raise ValueError(f"m={m} does not divide d={d}")
        W = tuple(sorted({int(r) for r in self.W}))
        if not W:
            raise ValueError("W must be nonempty")
        if any(not 0 <= r < m for r in W):
            raise ValueError(f"W must lie in Z_{m}")
        depth = m - 1 if self.depth is None else int(self.depth)
        if depth < 0:
            raise ValueError("depth must be nonnegative")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "depth", depth)

    @property
    def J(self) -> int:
        return self.d // self.m

    @property
    def group(self) -> FiniteGroup:
        return make_group(self.d)

    @property
    def omega(self) -> tuple[int, ...]:
        return tuple(sorted(r + self.m * j for r in self.W for j in range(self.J)))

    def induced_plan(self) -> SamplingPlan:
        return SamplingPlan.make(self.d, self.omega, self.depth)


def slice_values(kernel: Kernel, m: int, k: int) -> np.ndarray:
    """``[a_hat(k), a_hat(k + J), ..., a_hat(k + (m-1) J)]`` with ``J = d / m``."""
    d = kernel.order
    J = d // m
    return kernel.symbol[k + J * np.arange(m)]


def _check_cyclic_divisor(kernel: Kernel, m: int) -> None:
    if kernel.group.ndim != 1:
        raise ValueError("periodic tests need a cyclic group")
    d = kernel.order
    if m <= 1 or d % m:
        raise ValueError(f"m={m} must be a divisor of d={d} larger than 1")


def periodic_frame_test(kernel: Kernel, plan: PeriodicPlan, tol: float = RANK_TOL,
                        group_tol: float = GROUP_TOL) -> FrameReport:
    """Slice-by-slice test for a union of periodic sets at depth ``m - 1``.

    For every frequency slice ``k`` and every level class of the slice, the
    columns ``b_r = F_m e_r`` (``r`` in ``W``) restricted to the class must span
    it.
    """
    _check_cyclic_divisor(kernel, plan.m)
    if plan.d != kernel.order:
        raise ValueError("plan and kernel live on different groups")
    m, J = plan.m, plan.J
    Fm = fourier_matrix(make_group(m)).entries
    W = list(plan.W)
    full = level_partition(kernel, group_tol)
    report = FrameReport(FRAME, kernel.order, kernel.order, full.max_size, method="periodic",
                         ambiguous=full.ambiguous)
    total = 0
    for k in range(J):
        part = partition_values(slice_values(kernel, m, k), group_tol)
        report.ambiguous |= part.ambiguous
        for j, cls in enumerate(part.classes):
            r = numerical_rank(Fm[np.ix_(list(cls), W)], tol)
            total += r
            if r < len(cls) and report.failing_slice is None:
                report.verdict = NEVER_FRAME
                report.failing_class = j
                report.failing_slice = k
                report.notes.append(f"slice {k}, level class {j} is not spanned")
    report.rank = total
    if report.verdict == NEVER_FRAME:
        return report
    if plan.depth < m - 1:
        direct = frame_test_direct(kernel, plan.induced_plan(), tol, group_tol)
        report.verdict, report.rank = direct.verdict, direct.rank
        report.notes.append("depth below m - 1; verdict taken from the direct test")
    return report


def min_period_bound(kernel: Kernel, m: int, group_tol: float = GROUP_TOL) -> int:
    """Largest multiplicity inside any frequency slice: a lower bound on ``|W|``."""
    _check_cyclic_divisor(kernel, m)
    J = kernel.order // m
    return max(partition_values(slice_values(kernel, m, k), group_tol).max_size for k in range(J))
