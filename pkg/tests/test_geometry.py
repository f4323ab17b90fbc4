import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cylwalk.geometry import (BlockSpec, CylinderPoint, block_contains,
                              boundary, core_range,
                              enumerate_planes, inner_range, make_plane,
                              neighbors, offsets_count, outer_range, project,
                              seg_sites, star_neighbors, SegmentSpec)


def test_project_identity():
    p = project((0, 0, 0), 5)
    assert p.torus == (0, 0) and p.z == 0


def test_project_modular_reduction():
    p = project((7, -1, 3), 5)
    assert p.torus == (2, 4) and p.z == 3


@given(st.lists(st.integers(-50, 50), min_size=2, max_size=5),
       st.integers(1, 9), st.integers(0, 4))
def test_project_periodicity(x, N, axis):
    axis = axis % (len(x) - 1)
    shifted = list(x)
    shifted[axis] += N
    assert project(x, N) == project(shifted, N)
    bumped = list(x)
    bumped[-1] += 1
    assert project(bumped, N).z == project(x, N).z + 1


def test_neighbors_d1_n5_exact():
    p = CylinderPoint((0,), 0)
    got = set(q.as_tuple() for q in neighbors(p, 5))
    assert got == {(1, 0), (4, 0), (0, 1), (0, -1)}


@given(st.integers(1, 3), st.integers(3, 7), st.integers(-5, 5))
@settings(max_examples=50)
def test_neighbors_regular_and_symmetric(d, N, z):
    p = CylinderPoint((1 % N,) * d, z)
    nb = neighbors(p, N)
    assert len(nb) == 2 * (d + 1)
    assert len(set(nb)) == 2 * (d + 1)
    for q in nb:
        assert p in neighbors(q, N)


def test_neighbors_small_torus_deduplicated():
    p = CylinderPoint((0,), 0)
    nb = neighbors(p, 2)
    assert len(nb) == len(set(nb)) == 3  # (1,0) collapses, plus z+-1


def test_star_neighbors_counts():
    assert len(star_neighbors(CylinderPoint((0,), 0), 5)) == 8
    assert len(star_neighbors(CylinderPoint((0, 0), 0), 5)) == 26
    with pytest.raises(ValueError):
        star_neighbors(CylinderPoint((0,), 0), 2)


def test_star_neighbors_symmetry():
    p = CylinderPoint((1, 2), 3)
    for q in star_neighbors(p, 5):
        assert p in star_neighbors(q, 5)


def test_boundary_empty():
    assert boundary([], 5) == set()


def test_boundary_single_site():
    p = CylinderPoint((0,), 0)
    assert boundary([p], 5) == set(neighbors(p, 5))


def test_boundary_of_full_slab():
    # a full level is bounded by exactly the two adjacent levels
    N, d = 4, 2
    slab = [CylinderPoint(t, 0) for t in itertools.product(range(N), repeat=d)]
    b = boundary(slab, N)
    assert len(b) == 2 * N ** d
    assert {p.z for p in b} == {-1, 1}


def test_block_ranges_at_n4():
    assert core_range(0, 4) == (-3, 3)
    assert inner_range(0, 4) == (-4, 4)
    assert outer_range(0, 4) == (-7, 7)


@given(st.integers(-4, 4), st.integers(2, 40))
def test_block_nesting_and_translation(j, N):
    clo, chi = core_range(j, N)
    ilo, ihi = inner_range(j, N)
    olo, ohi = outer_range(j, N)
    assert ilo < clo <= chi < ihi or (ilo <= clo and chi <= ihi)
    assert ilo <= clo and chi <= ihi
    assert olo < ilo and ihi < ohi
    # translation by j*N
    c0 = core_range(0, N)
    assert (clo - j * N, chi - j * N) == c0
    assert block_contains(BlockSpec(j, N, "core"), CylinderPoint((0,), j * N))


def test_block_membership_is_z_only():
    spec = BlockSpec(0, 4, "inner")
    assert block_contains(spec, CylinderPoint((3,), 4))
    assert not block_contains(spec, CylinderPoint((3,), 5))


def test_block_kind_validation():
    with pytest.raises(ValueError):
        BlockSpec(0, 4, "giant")
    with pytest.raises(ValueError):
        BlockSpec(0, 1, "core")


# -- planes ---------------------------------------------------------------

def brute_force_planes(j, m, N, d):
    """Independent oracle: enumerate all (axis set, base) pairs over a
    covering range and dedupe by the literal site sets."""
    clo, chi = core_range(j, N)
    sets = {}
    for axes in itertools.combinations(range(d + 1), m):
        axset = frozenset(axes)
        zbases = range(clo - 1, chi + 2) if d not in axset else [0]
        for tbase in itertools.product(range(N), repeat=d):
            for zb in zbases:
                sites = frozenset(_plane_sites(axset, tbase, zb, N, d, clo, chi))
                if sites and any(clo <= z <= chi for _, z in sites):
                    sets.setdefault((axset, sites))
    return sets


def _plane_sites(axset, tbase, zb, N, d, clo, chi):
    """All plane sites with height within [clo-1, chi+1] (enough to
    distinguish planes and to test core intersection)."""
    tor_ranges = [range(N) if a in axset else [tbase[a]] for a in range(d)]
    zr = range(clo - 1, chi + 2) if d in axset else [zb]
    for tor in itertools.product(*tor_ranges):
        for z in zr:
            yield tor, z


@pytest.mark.parametrize("d,m,N", [(2, 2, 4), (2, 1, 3), (1, 1, 4), (2, 2, 5)])
def test_enumerate_planes_against_bruteforce(d, m, N):
    planes = list(enumerate_planes(0, m, N, d))
    assert len(planes) == len(set(planes)), "canonical forms must be unique"
    oracle = brute_force_planes(0, m, N, d)
    # distinct site sets in the oracle
    distinct = {s for _, s in oracle}
    assert len(planes) == len(distinct)
    clo, chi = core_range(0, N)
    for pl in planes:
        # correct dimensionality and core intersection
        assert pl.m == m
        probe = CylinderPoint(
            tuple(0 if a in pl.axes else pl.base[a] for a in range(d)),
            max(clo, min(chi, pl.base[d])) if d not in pl.axes else clo)
        assert pl.contains(probe)


def test_enumerate_planes_full_space():
    planes = list(enumerate_planes(0, 3, 4, 2))
    assert len(planes) == 1
    assert planes[0].axes == frozenset({0, 1, 2})


def test_enumerate_planes_rejects_bad_m():
    with pytest.raises(ValueError):
        list(enumerate_planes(0, 0, 4, 2))
    with pytest.raises(ValueError):
        list(enumerate_planes(0, 4, 4, 2))


def test_plane_canonicalization_and_membership():
    pl = make_plane({0}, (3, 2, 7), 5)
    assert pl.base == (0, 2, 7)
    assert pl.contains(CylinderPoint((4, 2), 7))
    assert not pl.contains(CylinderPoint((4, 3), 7))
    assert not pl.contains(CylinderPoint((4, 2), 8))


def test_segment_spec_sites_wrap():
    seg = SegmentSpec(CylinderPoint((3,), 0), axis=0, sign=1, length=3)
    sites = seg.sites(5)
    assert [s.torus[0] for s in sites] == [3, 4, 0, 1]
    segz = SegmentSpec(CylinderPoint((0,), -1), axis=1, sign=-1, length=2)
    assert [s.z for s in segz.sites(5)] == [-1, -2, -3]


def test_probe_scales():
    assert seg_sites(1.0, 16) == 2  # floor(ln 16) = 2
    assert seg_sites(2.0, 16) == 5
    assert offsets_count(16) == 4
    assert offsets_count(10) == 4
