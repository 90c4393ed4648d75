"""Evolve, sample and reconstruct: ``f -> {(A^t f)(i)}`` and its least-squares inverse."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from .frames import FrameReport, SamplingPlan, analysis_rows, bind, frame_test_direct
from .groups import RANK_TOL, fourier_matrix, rank_from_singular_values, singular_values
from .spectral import GROUP_TOL, Kernel


@dataclass(frozen=True)
class SampleRecord:
    sensor: int
    time: int
    value: complex


@dataclass
class ReconstructionResult:
    estimate: np.ndarray
    residual_norm: float
    condition_number: float
    exact_flag: bool
    rank: int
    required_rank: int
    frame_report: FrameReport | None = None

    @property
    def rank_deficiency(self) -> int:
        return self.required_rank - self.rank


def subsample(v, omega: Iterable[int]) -> np.ndarray:
    """Keep the entries of ``v`` indexed by ``omega``, zero the rest."""
    v = np.asarray(v)
    omega = sorted({int(i) for i in omega})
    if not omega:
        raise ValueError("omega must be nonempty")
    if omega[0] < 0 or omega[-1] >= v.size:
        raise IndexError(f"omega out of range for length {v.size}")
    out = np.zeros_like(v)
    out[omega] = v[omega]
    return out


def _trajectory(kernel: Kernel, f: np.ndarray, steps: int) -> np.ndarray:
    """Rows ``A^t f`` for ``t = 0..steps``."""
    F = fourier_matrix(kernel.group).entries
    fhat = F @ f
    powers = kernel.symbol[None, :] ** np.arange(steps + 1)[:, None]
    return (powers * fhat[None, :]) @ F.conj()


def simulate_samples(kernel: Kernel, f, plan: SamplingPlan, noise_std: float = 0.0,
                     seed: int | np.random.Generator | None = None) -> list[SampleRecord]:
    """Samples ``(A^t f)(i)`` for every sensor ``i`` and ``t = 0..l_i``, plus circular Gaussian noise."""
    f = np.asarray(f, dtype=complex).reshape(-1)
    if f.size != kernel.order:
        raise ValueError(f"state has length {f.size}, group order is {kernel.order}")
    if plan.group != kernel.group:
        raise ValueError("plan and kernel live on different groups")
    if noise_std < 0:
        raise ValueError("noise_std must be nonnegative")
    plan = bind(plan, kernel)
    traj = _trajectory(kernel, f, max(plan.depths))
    rng = np.random.default_rng(seed)
    out = []
    for i, l in zip(plan.omega, plan.depths):
        vals = traj[: l + 1, i]
        if noise_std > 0:
            vals = vals + noise_std * (rng.standard_normal(l + 1) + 1j * rng.standard_normal(l + 1)) / np.sqrt(2)
        out.extend(SampleRecord(i, t, complex(v)) for t, v in enumerate(vals))
    return out


def sampling_matrix(kernel: Kernel, records: Sequence[tuple[int, int]], domain: str = "space") -> np.ndarray:
    """Rows ``e_i^T A^t`` for each ``(sensor, time)`` pair.

    ``domain="frequency"`` drops the trailing ``F``: the rows are then those of
    the adjoint kernel's analysis matrix.
    """
    # e_i^T A^t = e_i^T F^* diag(a_hat^t) F = (conj(a_hat)^t * F e_i)^* F
    G = analysis_rows(kernel.adjoint(), records)
    if domain == "frequency":
        return G
    if domain == "space":
        return G @ fourier_matrix(kernel.group).entries
    raise ValueError(f"unknown domain {domain!r}")


def reconstruct(kernel: Kernel, plan: SamplingPlan, samples: Sequence[SampleRecord], tol: float = RANK_TOL,
                group_tol: float = GROUP_TOL, residual_tol: float = 1e-8) -> ReconstructionResult:
    """Least-squares initial state from spatiotemporal samples.

    The system is solved for ``F f`` (the sampling matrix is diagonal-times-
    characters there) with a truncated SVD, singular values below
    ``tol * sigma_max`` dropped, then mapped back with the unitary ``F^*``.
    The attached frame report is for the adjoint kernel, whose frame property
    is what makes recovery stable.
    """
    if not samples:
        raise ValueError("no samples given")
    plan = bind(plan, kernel, group_tol=group_tol)
    depth = plan.depth_map()
    seen = set()
    for rec in samples:
        if rec.sensor not in depth:
            raise ValueError(f"sample from sensor {rec.sensor} which is not in the plan")
        if not 0 <= rec.time <= depth[rec.sensor]:
            raise ValueError(f"sample time {rec.time} outside 0..{depth[rec.sensor]} for sensor {rec.sensor}")
        key = (rec.sensor, rec.time)
        if key in seen:
            raise ValueError(f"duplicate sample {key}")
        seen.add(key)

    G = sampling_matrix(kernel, [(r.sensor, r.time) for r in samples], domain="frequency")
    y = np.array([r.value for r in samples], dtype=complex)
    n = kernel.order
    s = singular_values(G)
    rank = rank_from_singular_values(s, tol)
    # rank and conditioning use the same singular values as the frame report
    U, sv, Vh = np.linalg.svd(G, full_matrices=False)
    g = Vh[:rank].conj().T @ ((U[:, :rank].conj().T @ y) / sv[:rank])
    F = fourier_matrix(kernel.group).entries
    estimate = F.conj().T @ g
    residual = float(np.linalg.norm(G @ g - y))
    cond = float(s[0] / s[rank - 1]) if rank else float("inf")
    exact = rank == n and residual <= residual_tol * max(1.0, float(np.linalg.norm(y)))

    report = frame_test_direct(kernel.adjoint(), plan, tol, group_tol)
    report.kernel_role = "adjoint"
    return ReconstructionResult(estimate, residual, cond, bool(exact), rank, n, report)
