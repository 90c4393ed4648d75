"""Hot combinatorial kernels with a numba path and a pure-numpy path.

Backend selection: ``DYNSAMP_BACKEND=numba`` (default when numba imports)
or ``DYNSAMP_BACKEND=numpy``.  Every public function also takes an explicit
``backend=`` override, which the benchmarks and equivalence tests use.

Both kernels answer "which of these column subsets / sensor sets yield a
rank-deficient block", the inner loop of spark computation and of the
exhaustive admissible-set search.
"""

from __future__ import annotations

import os
from collections.abc import Iterator
from itertools import islice

import numpy as np

try:
    import numba
    from numba import njit
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

CHUNK = 4096


def default_backend() -> str:
    name = os.environ.get("DYNSAMP_BACKEND", "numba").strip().lower()
    if name not in ("numba", "numpy"):
        raise ValueError(f"DYNSAMP_BACKEND must be 'numba' or 'numpy', got {name!r}")
    if name == "numba" and numba is None:
        return "numpy"
    return name


def _resolve(backend: str | None) -> str:
    if backend is None:
        return default_backend()
    if backend == "numba" and numba is None:
        raise RuntimeError("numba backend requested but numba is not importable")
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    return backend


def worker_count() -> int:
    """Worker cap from ``DYNSAMP_THREADS`` (default 1)."""
    raw = os.environ.get("DYNSAMP_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def colex_subsets(n: int, k: int) -> Iterator[tuple[int, ...]]:
    """k-subsets of ``range(n)`` in colexicographic order."""
    if k == 0:
        yield ()
        return
    if k > n:
        return
    c = list(range(k))
    while True:
        yield tuple(c)
        j = 0
        while j < k - 1 and c[j] + 1 == c[j + 1]:
            j += 1
        if j == k - 1 and c[j] + 1 == n:
            return
        c[j] += 1
        for t in range(j):
            c[t] = t


def _deficient(s: np.ndarray, need: int, tol: float, floor: float) -> np.ndarray:
    """Rows of a stacked singular-value array whose numerical rank is below ``need``."""
    smax = s.max(axis=-1)
    good = (s > tol * smax[..., None]) & (s > floor)
    return (smax <= floor) | (good.sum(axis=-1) < need)


# -- numpy path -------------------------------------------------------------------


def _scan_subsets_numpy(mat, k, tol, floor):
    n = mat.shape[1]
    gen = colex_subsets(n, k)
    scanned = 0
    while True:
        block = list(islice(gen, CHUNK))
        if not block:
            return None, scanned
        idx = np.asarray(block, dtype=np.intp)
        stack = np.moveaxis(mat[:, idx], 1, 0)  # (B, m, k)
        s = np.linalg.svd(stack, compute_uv=False)
        bad = np.flatnonzero(_deficient(s, k, tol, floor))
        if bad.size:
            first = int(bad[0])
            return tuple(block[first]), scanned + first + 1
        scanned += len(block)


def _admissible_numpy(mat, members, ptr, combos, tol, floor):
    combos = np.asarray(combos, dtype=np.intp)
    ok = np.ones(len(combos), dtype=bool)
    size = combos.shape[1]
    for c in range(len(ptr) - 1):
        rows = members[ptr[c]:ptr[c + 1]]
        if rows.size > size:
            ok[:] = False
            break
        live = np.flatnonzero(ok)
        if live.size == 0:
            break
        block = mat[rows][:, combos[live]]  # (|class|, B, size)
        s = np.linalg.svd(np.moveaxis(block, 1, 0), compute_uv=False)
        ok[live[_deficient(s, rows.size, tol, floor)]] = False
    return ok


# -- numba path -------------------------------------------------------------------

if numba is not None:

    @njit(cache=True, nogil=True)
    def _jacobi_sv(w, out):
        """One-sided Jacobi: orthogonalise the columns of ``w`` in place, column norms into ``out``.

        Cheaper than a LAPACK call for the tiny blocks scanned here and
        accurate to working precision.
        """
        m, n = w.shape
        for sweep in range(60):
            rotated = False
            for p in range(n - 1):
                for q in range(p + 1, n):
                    a = 0.0
                    b = 0.0
                    g = 0.0 + 0.0j
                    for i in range(m):
                        a += w[i, p].real ** 2 + w[i, p].imag ** 2
                        b += w[i, q].real ** 2 + w[i, q].imag ** 2
                        g += w[i, p].conjugate() * w[i, q]
                    ag = abs(g)
                    if ag <= 1e-15 * np.sqrt(a * b) or ag == 0.0:
                        continue
                    rotated = True
                    ph = g / ag
                    zeta = (b - a) / (2.0 * ag)
                    t = (1.0 if zeta >= 0 else -1.0) / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                    c = 1.0 / np.sqrt(1.0 + t * t)
                    s = c * t
                    for i in range(m):
                        x = w[i, p]
                        y = w[i, q] / ph
                        w[i, p] = c * x - s * y
                        w[i, q] = s * x + c * y
            if not rotated:
                break
        for j in range(n):
            acc = 0.0
            for i in range(m):
                acc += w[i, j].real ** 2 + w[i, j].imag ** 2
            out[j] = np.sqrt(acc)

    @njit(cache=True, nogil=True)
    def _rank_ok(sub, need, tol, floor, sv):
        """``sub`` has at most as many columns as rows and is overwritten."""
        _jacobi_sv(sub, sv)
        smax = 0.0
        for v in sv:
            if v > smax:
                smax = v
        if smax <= floor:
            return False
        r = 0
        for v in sv:
            if v > tol * smax and v > floor:
                r += 1
        return r >= need

    @njit(cache=True, nogil=True)
    def _scan_subsets_nb(mat, k, tol, floor):
        m, n = mat.shape
        c = np.arange(k).astype(np.int64)
        sub = np.empty((m, k), dtype=np.complex128)
        sv = np.empty(k, dtype=np.float64)
        scanned = 0
        while True:
            for j in range(k):
                for i in range(m):
                    sub[i, j] = mat[i, c[j]]
            scanned += 1
            if not _rank_ok(sub, k, tol, floor, sv):
                return c, scanned
            j = 0
            while j < k - 1 and c[j] + 1 == c[j + 1]:
                j += 1
            if j == k - 1 and c[j] + 1 == n:
                return np.empty(0, dtype=np.int64), scanned
            c[j] += 1
            for t in range(j):
                c[t] = t

    @njit(cache=True, nogil=True)
    def _admissible_nb(mat, members, ptr, combos, tol, floor):
        B, size = combos.shape
        ok = np.ones(B, dtype=np.bool_)
        nclass = ptr.shape[0] - 1
        hmax = 0
        for c in range(nclass):
            hmax = max(hmax, ptr[c + 1] - ptr[c])
        buf = np.empty((size, max(hmax, 1)), dtype=np.complex128)
        sv = np.empty(max(hmax, 1), dtype=np.float64)
        for b in range(B):
            for c in range(nclass):
                lo = ptr[c]
                hi = ptr[c + 1]
                h = hi - lo
                if h > size:
                    ok[b] = False
                    break
                # transposed block: the class indexes columns, so columns <= rows
                sub = buf[:, :h]
                for i in range(h):
                    for j in range(size):
                        sub[j, i] = mat[members[lo + i], combos[b, j]]
                if not _rank_ok(sub, h, tol, floor, sv[:h]):
                    ok[b] = False
                    break
        return ok


# -- public entry points ----------------------------------------------------------


def first_dependent_subset(mat, k: int, tol: float, floor: float,
                           backend: str | None = None) -> tuple[tuple[int, ...] | None, int]:
    """First size-``k`` column subset (colex order) whose block is rank deficient.

    Returns ``(subset or None, number of subsets examined)``.
    """
    mat = np.ascontiguousarray(mat, dtype=np.complex128)
    n = mat.shape[1]
    if not 1 <= k <= n:
        raise ValueError(f"subset size {k} out of range for {n} columns")
    if _resolve(backend) == "numba":
        c, scanned = _scan_subsets_nb(mat, k, float(tol), float(floor))
        return (tuple(int(x) for x in c) if c.size else None), int(scanned)
    return _scan_subsets_numpy(mat, k, float(tol), float(floor))


def admissible_mask(mat, classes, combos, tol: float, floor: float,
                    backend: str | None = None) -> np.ndarray:
    """For each row of ``combos`` (a sensor set), whether every class block has full row rank.

    The block for class ``L`` and sensor set ``W`` is ``mat[L][:, W]``.
    """
    mat = np.ascontiguousarray(mat, dtype=np.complex128)
    combos = np.ascontiguousarray(combos, dtype=np.int64)
    if combos.ndim != 2:
        raise ValueError("combos must be a 2-D array of sensor sets")
    if combos.shape[0] == 0:
        return np.zeros(0, dtype=bool)
    # largest classes first: they fail most often, which prunes early
    classes = sorted((list(c) for c in classes), key=len, reverse=True)
    members = np.asarray([i for c in classes for i in c], dtype=np.int64)
    ptr = np.cumsum([0] + [len(c) for c in classes]).astype(np.int64)
    if _resolve(backend) == "numba":
        return _admissible_nb(mat, members, ptr, combos, float(tol), float(floor))
    return _admissible_numpy(mat, members, ptr, combos, float(tol), float(floor))
