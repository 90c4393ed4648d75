"""Frequency-symmetry classes on Z_d x Z_d (d odd) and kernels that realise them.

Orbits are computed in the centred range ``{-(d-1)/2, ..., (d-1)/2}^2`` and
reported as flat residues ``d * s + p`` (``s, p`` taken mod d).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import make_group
from .spectral import Kernel, kernel_from_partition, kernel_from_symbol, separated_values

KINDS = ("linf", "quadrantal", "diagonal", "octagonal")


@dataclass(frozen=True)
class SymmetryClass:
    kind: str
    d: int

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown symmetry {self.kind!r}; expected one of {KINDS}")
        if self.d < 1 or self.d % 2 == 0:
            raise ValueError(f"symmetry classes need odd d, got {self.d}")

    @property
    def half(self) -> int:
        return (self.d - 1) // 2


def _images(kind: str, s: int, p: int) -> set[tuple[int, int]]:
    if kind == "quadrantal":
        return {(s, p), (s, -p), (-s, p), (-s, -p)}
    if kind == "diagonal":
        return {(s, p), (p, s), (-s, -p), (-p, -s)}
    if kind == "octagonal":
        return {(a, b) for a, b in ((s, p), (p, s)) for a, b in ((a, b), (-a, b), (a, -b), (-a, -b))}
    raise ValueError(kind)


def centred_orbits(sym: SymmetryClass) -> list[list[tuple[int, int]]]:
    """Orbits as sorted lists of centred coordinates, ordered by their smallest member."""
    h = sym.half
    pts = [(s, p) for s in range(-h, h + 1) for p in range(-h, h + 1)]
    if sym.kind == "linf":
        shells: dict[int, list] = {}
        for s, p in pts:
            shells.setdefault(max(abs(s), abs(p)), []).append((s, p))
        orbits = [sorted(v) for v in shells.values()]
    else:
        seen: set[tuple[int, int]] = set()
        orbits = []
        for pt in pts:
            if pt in seen:
                continue
            orb = sorted(_images(sym.kind, *pt))
            seen.update(orb)
            orbits.append(orb)
    return sorted(orbits, key=lambda o: o[0])


def orbits(sym: SymmetryClass) -> list[tuple[int, ...]]:
    """Orbits as sorted tuples of flat indices into Z_d x Z_d."""
    d = sym.d
    return [tuple(sorted((s % d) * d + (p % d) for s, p in orb)) for orb in centred_orbits(sym)]


def class_multiplicity(sym: SymmetryClass) -> int:
    """Largest orbit size (``M_A`` of a generic kernel in the class)."""
    return max(len(o) for o in orbits(sym))


def random_symmetric_kernel(sym: SymmetryClass, seed: int | np.random.Generator | None = None) -> Kernel:
    """Kernel constant on each orbit with well-separated values across orbits."""
    rng = np.random.default_rng(seed)
    orbs = orbits(sym)
    return kernel_from_partition(make_group((sym.d, sym.d)), orbs, values=separated_values(len(orbs), rng))


def monotone_symmetric_kernel_1d(d: int) -> Kernel:
    """``a_hat(j) = d - min(j, d - j)``: symmetric, strictly decreasing on ``0..(d-1)/2``."""
    if d < 1 or d % 2 == 0:
        raise ValueError(f"need odd d, got {d}")
    j = np.arange(d)
    return kernel_from_symbol(d, (d - np.minimum(j, d - j)).astype(float))
