import io
import itertools
import json
import random

import pytest

from cylwalk.geometry import CylinderPoint, core_range, seg_sites
from cylwalk.vacant import (SlabSnapshot, analysis_record, check_G, check_U,
                            check_V, departure_time_of, disconnection_time,
                            is_disconnecting, planar_components_event,
                            segment_census, segment_linkage,
                            snapshot_disconnected, validate_analysis_record,
                            write_analysis_records)
from cylwalk.walk import TrajectoryStore, WalkConfig


def full_level(N, d, z=0):
    return [CylinderPoint(t, z) for t in itertools.product(range(N), repeat=d)]


def window_sites(N, d, z_lo, z_hi):
    return [CylinderPoint(t, z)
            for t in itertools.product(range(N), repeat=d)
            for z in range(z_lo, z_hi + 1)]


def test_empty_set_does_not_disconnect():
    assert not is_disconnecting([], 4, 1)


@pytest.mark.parametrize("d,N", [(1, 4), (2, 3), (2, 4)])
def test_full_level_disconnects(d, N):
    slab = full_level(N, d)
    assert is_disconnecting(slab, N, d)
    assert not is_disconnecting(slab[:-1], N, d)  # one hole opens a path


def test_tilted_cut_disconnects():
    # a staircase using two adjacent levels still separates
    N, d = 4, 1
    sites = [CylinderPoint((t,), 0 if t < 2 else 1) for t in range(N)]
    # the diagonal leaves gaps a nearest-neighbor path can slip through
    # unless the overlap column is doubled
    sites.append(CylinderPoint((1,), 1))
    sites.append(CylinderPoint((3,), 0))
    assert is_disconnecting(sites, N, d)


def test_min_cut_exhaustive_tiny():
    # any set smaller than N^d leaves a vertical line untouched
    for N, d in [(2, 1), (3, 1), (2, 2)]:
        nd = N ** d
        pool = window_sites(N, d, -2, 2)
        for size in range(nd):
            for combo in itertools.combinations(pool, size):
                assert not is_disconnecting(combo, N, d), (N, d, combo)


def test_min_cut_sampled_n3_d2():
    rng = random.Random(7)
    pool = window_sites(3, 2, -2, 2)
    for _ in range(300):
        combo = rng.sample(pool, 8)  # fewer than 3^2 sites
        assert not is_disconnecting(combo, 3, 2)


def test_monotone_under_superset():
    rng = random.Random(11)
    pool = window_sites(3, 1, -2, 2)
    for _ in range(200):
        big = rng.sample(pool, rng.randint(1, len(pool)))
        small = [s for s in big if rng.random() < 0.6]
        if is_disconnecting(small, 3, 1):
            assert is_disconnecting(big, 3, 1)


def test_component_labeling_contract():
    from cylwalk.vacant import component_labeling
    # two vacant sites share a label iff a vacant path inside the slab
    # joins them; the full slab splits top from bottom
    N, d = 3, 1
    sites = full_level(N, d)
    keys = {s.z * N + s.torus[0]: 0 for s in sites}
    snap = SlabSnapshot(keys, d, N, -2, 2)
    lab = component_labeling(snap)
    assert lab.disconnected()
    above = 1 * N + 0
    below = -1 * N + 0
    assert not lab.same_component(above, below)
    assert lab.same_component(above, 1 * N + 1)
    # removing one slab site reconnects everything
    keys2 = dict(keys)
    del keys2[0 * N + 0]
    lab2 = component_labeling(SlabSnapshot(keys2, d, N, -2, 2))
    assert not lab2.disconnected()
    assert lab2.same_component(above, below)
    assert lab2.top_id == lab2.bottom_id


def test_slab_padding_never_changes_verdict():
    sites = full_level(3, 1) + [CylinderPoint((1,), 4)]
    snap_keys = {}
    nd = 3
    for s in sites:
        snap_keys[s.z * nd + s.torus[0]] = 0
    tight = SlabSnapshot(snap_keys, 1, 3, -1, 5)
    padded = SlabSnapshot(snap_keys, 1, 3, -9, 13)
    assert snapshot_disconnected(tight) == snapshot_disconnected(padded) is True


# -- exact disconnection time -------------------------------------------------

def test_disconnection_time_cadence_oracle():
    # checkpoint+binary-search equals per-step detection on 50 seeded runs
    for r in range(50):
        cfg = WalkConfig(1, 4, 2024, replica=r)
        fine = disconnection_time(cfg, cadence=1, growth=1.0)
        coarse = disconnection_time(cfg, cadence=1000, growth=2.0)
        assert fine.time == coarse.time
        assert not fine.censored


def test_disconnection_time_lower_bound():
    for r in range(30):
        res = disconnection_time(WalkConfig(1, 4, 5, replica=r))
        assert res.time >= 4 ** 1 - 1
    for r in range(5):
        res = disconnection_time(WalkConfig(2, 3, 5, replica=r))
        assert res.time >= 3 ** 2 - 1


def test_disconnection_time_censoring():
    res = disconnection_time(WalkConfig(1, 6, 1, step_cap=20), cadence=4)
    assert res.censored and res.time is None
    assert res.steps_run == 20


def test_disconnection_deterministic():
    a = disconnection_time(WalkConfig(1, 6, 3, replica=2))
    b = disconnection_time(WalkConfig(1, 6, 3, replica=2))
    assert a.time == b.time


# -- vacant segment census -----------------------------------------------------

def test_census_trivial_empty_and_single():
    ok, _ = segment_census({}, 3, 16, 0, 1.0)
    assert ok
    # one visited site cannot block every offset
    ok, cens = segment_census({0: 0}, 2, 16, 0, 1.0, with_census=True)
    assert ok and cens.failures() == 0
    assert cens.offset_for(CylinderPoint((0, 0), 0), 0, 1) is not None


def test_census_adversarial_even_levels():
    # every even height visited inside the padded block blocks the vertical
    # direction for segments of one or more steps
    d, N = 2, 16
    nd = N ** d
    clo, chi = core_range(0, N)
    vis = {z * nd + i: 0
           for z in range(clo - 30, chi + 31) if z % 2 == 0
           for i in range(nd)}
    ok, _ = segment_census(vis, d, N, 0, 1.0)
    assert not ok
    # but horizontal directions alone would be fine
    ok_pos, _ = segment_census(vis, d, N, 0, 1.0, directions="positive")
    assert not ok_pos  # positive set still includes the vertical axis


def test_census_positive_mode_weaker():
    rng = random.Random(3)
    d, N = 2, 16
    nd = N ** d
    clo, chi = core_range(0, N)
    for _ in range(20):
        vis = {z * nd + rng.randrange(nd): 0
               for z in range(clo - 10, chi + 11)
               for _ in range(rng.randrange(0, 60))}
        full, _ = segment_census(vis, d, N, 0, 1.0)
        pos, _ = segment_census(vis, d, N, 0, 1.0, directions="positive")
        if full:
            assert pos


def test_census_time_filter_monotone():
    # growing the trace can only break the event
    traj = TrajectoryStore(WalkConfig(3, 8, 31), keep_path=False, record=True)
    traj.run(4000)
    st = traj.state
    oks = [segment_census(st.visited, 3, 8, 0, 0.8, n=n)[0]
           for n in (0, 50, 500, 4000)]
    for a, b in zip(oks, oks[1:]):
        assert a or not b


# -- planar component event ------------------------------------------------------

def test_planar_event_empty_trace():
    assert planar_components_event({}, 2, 8, 0, 1.0, [0])


def test_planar_event_two_bands_fail():
    # two parallel visited circles pinch a toroidal section into two bands
    d, N = 2, 8
    nd = N ** d
    vis = {}
    for x0 in range(N):
        for x1 in (0, 4):
            vis[0 * nd + x1 * N + x0] = 0  # sites (x0, x1) at z=0, idx = x0 + N*x1
    assert not planar_components_event(vis, d, N, 0, 0.5, [0])


def test_planar_event_single_line_on_strip_fails():
    # on a section sweeping the vertical axis, one visited circle separates
    d, N = 1, 8
    nd = N
    vis = {0 * nd + i: 0 for i in range(N)}  # full level 0
    assert not planar_components_event(vis, d, N, 0, 0.5, [0])


def test_planar_event_sampling_mode():
    vis = {}
    assert planar_components_event(vis, 3, 8, 0, 1.0, [0], plane_samples=5)


def test_sparse_trace_keeps_one_component():
    # low-density noise should not split any section (spec-style check at
    # K giving a few-site threshold)
    rng = random.Random(5)
    d, N, K = 4, 12, 2.0
    nd = N ** d
    clo, chi = core_range(0, N)
    for _ in range(30):
        vis = {}
        n_sites = int(0.01 * nd * (chi - clo + 1))
        for _ in range(n_sites):
            z = rng.randrange(clo, chi + 1)
            vis[z * nd + rng.randrange(nd)] = 0
        assert planar_components_event(vis, d, N, 0, K, [0])


# -- linkage and the giant-frame implication ---------------------------------------

def test_linkage_empty_trace():
    v = segment_linkage({}, 2, 12, 0, L0=3)
    assert v.lines_ok and v.unique_component


def test_linkage_middle_slab_splits():
    d, N = 2, 12
    nd = N ** d
    vis = {0 * nd + i: 0 for i in range(nd)}  # full slab at z=0
    v = segment_linkage(vis, d, N, 0, L0=3)
    assert not v.unique_component  # two height bands
    # the torus lines lying inside the slab are fully covered as well
    assert not v.lines_ok
    # a slab with one hole keeps a single component but still kills lines
    del vis[0 * nd + 0]
    v2 = segment_linkage(vis, d, N, 0, L0=3)
    assert v2.unique_component


def test_linkage_requires_short_segments():
    with pytest.raises(ValueError):
        segment_linkage({}, 2, 8, 0, L0=4)


def test_giant_implies_linkage_on_synthetic_traces():
    # the chaining argument, exercised where the events genuinely hold:
    # random sparse traces, some passing, some failing
    rng = random.Random(9)
    d, N, K = 3, 12, 0.9
    L = seg_sites(K, N)
    nd = N ** d
    clo, chi = core_range(0, N)
    seen_giant = 0
    for trial in range(60):
        density = rng.choice([0.0, 0.001, 0.004, 0.02, 0.08])
        vis = {}
        n_sites = int(density * nd * (chi - clo + 1))
        for _ in range(n_sites):
            z = rng.randrange(clo - 8, chi + 9)
            vis[z * nd + rng.randrange(nd)] = 0
        ok_v, _ = segment_census(vis, d, N, 0, K)
        ok_u = planar_components_event(vis, d, N, 0, K, [0])
        if ok_v and ok_u:
            seen_giant += 1
            verdict = segment_linkage(vis, d, N, 0, L)
            assert verdict.lines_ok and verdict.unique_component
    assert seen_giant >= 10  # the implication was exercised, not vacuous


def test_trajectory_level_events_and_censoring():
    # a single visited site cannot block every offset once the offset
    # window exceeds the segment length (true from N = 16 at K = 1)
    cfg = WalkConfig(3, 16, 13, start="uniform_block")
    traj = TrajectoryStore(cfg, keep_path=False, record=True,
                           excursion_level=0, excursion_target=2)
    traj.run(10 ** 6)
    assert departure_time_of(traj, 0, 0) == 0
    assert departure_time_of(traj, 0, 99) is None
    assert check_V(traj, 1.0, 0, 99) is None      # censored
    assert check_U(traj, 1.0, 0, 99) is None
    ok0, _ = check_V(traj, 1.0, 0, 0)             # trace is one site
    assert ok0
    assert check_U(traj, 1.0, 0, 0)
    res = check_G(traj, 0, 0, K=1.0)
    assert res["giant"] is True


def test_check_g_needs_threshold_or_explicit_k():
    cfg = WalkConfig(3, 8, 14, start="uniform_block")
    traj = TrajectoryStore(cfg, keep_path=False, record=True,
                           excursion_level=0, excursion_target=1)
    traj.run(10 ** 5)
    with pytest.raises(ValueError):
        check_G(traj, 0, 1)   # rho(3) is not even defined (needs d >= 4)


# -- analysis records -----------------------------------------------------------

def test_analysis_record_roundtrip():
    rec = analysis_record(seed=1, d=3, N=16, j=0, u_or_t=0.1,
                          event="segments", value=True)
    buf = io.StringIO()
    write_analysis_records([rec], buf)
    parsed = json.loads(buf.getvalue())
    validate_analysis_record(parsed)
    assert parsed == rec


def test_analysis_record_validation():
    with pytest.raises(ValueError):
        validate_analysis_record({"seed": 1})
    bad = analysis_record(1, 3, 16, 0, 0.1, "segments", True)
    bad["extra"] = 1
    with pytest.raises(ValueError):
        validate_analysis_record(bad)
