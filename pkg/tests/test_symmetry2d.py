from __future__ import annotations

import numpy as np
import pytest

from dynsamp.frames import min_sensor_bound
from dynsamp.spectral import level_partition
from dynsamp.symmetry2d import (
    KINDS,
    SymmetryClass,
    centred_orbits,
    class_multiplicity,
    monotone_symmetric_kernel_1d,
    orbits,
    random_symmetric_kernel,
)

# orbit counts derived by brute force enumeration of the symmetry group actions
EXPECTED_COUNTS = {
    3: {"linf": 2, "quadrantal": 4, "diagonal": 4, "octagonal": 3},
    5: {"linf": 3, "quadrantal": 9, "diagonal": 9, "octagonal": 6},
    7: {"linf": 4, "quadrantal": 16, "diagonal": 16, "octagonal": 10},
}


def brute_orbits(kind, d):
    """Orbits under the generating maps, found by closure from each point."""
    h = (d - 1) // 2
    maps = {
        "quadrantal": [lambda s, p: (s, -p), lambda s, p: (-s, p)],
        "diagonal": [lambda s, p: (p, s), lambda s, p: (-s, -p)],
        "octagonal": [lambda s, p: (s, -p), lambda s, p: (-s, p), lambda s, p: (p, s)],
    }[kind]
    seen, out = set(), []
    for s in range(-h, h + 1):
        for p in range(-h, h + 1):
            if (s, p) in seen:
                continue
            orb, todo = {(s, p)}, [(s, p)]
            while todo:
                x = todo.pop()
                for f in maps:
                    y = f(*x)
                    if y not in orb:
                        orb.add(y)
                        todo.append(y)
            seen |= orb
            out.append(frozenset(orb))
    return set(out)


@pytest.mark.parametrize("d", [3, 5, 7, 9])
@pytest.mark.parametrize("kind", ["quadrantal", "diagonal", "octagonal"])
def test_orbits_match_closure(kind, d):
    got = {frozenset(o) for o in centred_orbits(SymmetryClass(kind, d))}
    assert got == brute_orbits(kind, d)


@pytest.mark.parametrize("d", [3, 5, 7])
def test_orbit_counts(d):
    for kind in KINDS:
        assert len(orbits(SymmetryClass(kind, d))) == EXPECTED_COUNTS[d][kind]


@pytest.mark.parametrize("d", [3, 5, 7, 9, 11])
def test_orbit_count_formulas(d):
    assert len(orbits(SymmetryClass("linf", d))) == (d + 1) // 2
    assert len(orbits(SymmetryClass("quadrantal", d))) == (d + 1) ** 2 // 4
    assert len(orbits(SymmetryClass("octagonal", d))) == (d + 1) * (d + 3) // 8


@pytest.mark.parametrize("d", [3, 5, 7, 9])
def test_orbit_sizes(d):
    for kind in KINDS:
        orbs = orbits(SymmetryClass(kind, d))
        assert sorted(i for o in orbs for i in o) == list(range(d * d))
        sizes = [len(o) for o in orbs]
        if kind == "linf":
            assert sorted(sizes) == [1] + [8 * l for l in range(1, (d + 1) // 2)]
        else:
            assert all((8 if kind == "octagonal" else 4) % s == 0 for s in sizes)


def test_class_multiplicities_d5():
    assert class_multiplicity(SymmetryClass("linf", 5)) == 16
    assert class_multiplicity(SymmetryClass("quadrantal", 5)) == 4
    assert class_multiplicity(SymmetryClass("diagonal", 5)) == 4
    assert class_multiplicity(SymmetryClass("octagonal", 5)) == 8
    # at d = 3 no 8-point octagonal orbit exists
    assert class_multiplicity(SymmetryClass("octagonal", 3)) == 4


@pytest.mark.parametrize("kind", KINDS)
def test_random_kernel_has_symmetry(kind):
    d = 7
    k = random_symmetric_kernel(SymmetryClass(kind, d), 3)
    sym = k.symbol.reshape(d, d)
    for orb in centred_orbits(SymmetryClass(kind, d)):
        vals = [sym[s % d, p % d] for s, p in orb]
        assert np.ptp(np.abs(vals)) == 0 and len(set(vals)) == 1
    part = level_partition(k)
    assert part.as_sets() == {frozenset(o) for o in orbits(SymmetryClass(kind, d))}


def test_min_sensor_bound_quadrantal():
    assert min_sensor_bound(random_symmetric_kernel(SymmetryClass("quadrantal", 5), 0)) == 4


def test_symmetry_class_validation():
    with pytest.raises(ValueError):
        SymmetryClass("linf", 4)
    with pytest.raises(ValueError):
        SymmetryClass("hexagonal", 5)


def test_monotone_kernel():
    k = monotone_symmetric_kernel_1d(7)
    np.testing.assert_array_equal(k.symbol.real, [7, 6, 5, 4, 4, 5, 6])
    assert level_partition(k).max_size == 2
    with pytest.raises(ValueError):
        monotone_symmetric_kernel_1d(6)


def test_seeded_kernels_are_reproducible():
    a = random_symmetric_kernel(SymmetryClass("octagonal", 5), 11)
    b = random_symmetric_kernel(SymmetryClass("octagonal", 5), 11)
    np.testing.assert_array_equal(a.symbol, b.symbol)
