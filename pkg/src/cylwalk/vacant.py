"""Connectivity analysis of the vacant set left by the walk.

The cylinder is infinite, but a finite trace only constrains a finite slab:
everything outside the slab spanning the trace's height range (padded by
one level) is vacant, so the two infinite ends are separated exactly when
the slab's top and bottom faces are in distinct vacant components.  All
analyzers here are pure functions of an immutable visited map.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .geometry import core_range, enumerate_planes, offsets_count, seg_sites
from .state import WalkState
from .unionfind import UnionFind
from .walk import TrajectoryStore, WalkConfig, excursions, ledger_from_state

_STRUCTURES: dict[int, np.ndarray] = {}


def _structure(rank: int) -> np.ndarray:
    if rank not in _STRUCTURES:
        _STRUCTURES[rank] = ndimage.generate_binary_structure(rank, 1)
    return _STRUCTURES[rank]


# -- occupancy grids ---------------------------------------------------------

def _occupancy(visited: dict[int, int], d: int, N: int, z_lo: int, z_hi: int,
               n: int | None = None) -> np.ndarray:
    """Boolean grid of visited sites, shape (z extent, N, ..., N).

    Axis 0 is the height (z_lo..z_hi); the remaining axes are the torus
    directions.  Packed keys are laid out so that the flat grid position is
    key - z_lo * N**d, which makes the fill a single scatter.
    """
    nd = N ** d
    H = z_hi - z_lo + 1
    occ = np.zeros(nd * H, dtype=bool)
    if visited:
        keys = np.fromiter(visited.keys(), dtype=np.int64, count=len(visited))
        if n is not None:
            times = np.fromiter(visited.values(), dtype=np.int64,
                                count=len(visited))
            keys = keys[times <= n]
        lo = z_lo * nd
        keys = keys[(keys >= lo) & (keys < (z_hi + 1) * nd)]
        occ[keys - lo] = True
    return occ.reshape((H,) + (N,) * d)


def _label_with_wrap(vacant: np.ndarray, wrap_axes) -> tuple[np.ndarray, UnionFind, int]:
    """Connected components of a boolean grid, gluing the given axes into
    circles.  Returns (labels, union-find over label roots, n_labels)."""
    labels, n_labels = ndimage.label(vacant, structure=_structure(vacant.ndim))
    uf = UnionFind(n_labels + 1)
    for ax in wrap_axes:
        if vacant.shape[ax] < 2:
            continue
        first = np.take(labels, 0, axis=ax).ravel()
        last = np.take(labels, vacant.shape[ax] - 1, axis=ax).ravel()
        both = (first > 0) & (last > 0)
        if both.any():
            pairs = np.unique(np.stack([first[both], last[both]], axis=1), axis=0)
            for a, b in pairs:
                uf.union(int(a), int(b))
    return labels, uf, n_labels


# -- disconnection -----------------------------------------------------------

@dataclass(frozen=True)
class SlabSnapshot:
    """A finite window of the cylinder holding everything the trace
    constrains: the visited map plus slab bounds strictly containing the
    trace's height range."""

    visited: dict[int, int]
    d: int
    N: int
    z_min: int
    z_max: int

    @classmethod
    def from_state(cls, st: WalkState, pad: int = 1) -> "SlabSnapshot":
        return cls(st.visited, st.d, st.N, st.zmin - pad, st.zmax + pad)


def _slab_disconnected(visited: dict[int, int], d: int, N: int,
                       z_lo: int, z_hi: int, n: int | None = None) -> bool:
    occ = _occupancy(visited, d, N, z_lo, z_hi, n)
    labels, uf, _ = _label_with_wrap(~occ, wrap_axes=range(1, d + 1))
    top = labels[(-1,) + (0,) * d]
    bottom = labels[(0,) + (0,) * d]
    return not uf.connected(int(top), int(bottom))


def is_disconnecting(sites, N: int, d: int) -> bool:
    """Whether removing the finite site set separates the cylinder's two
    infinite ends.

    sites: iterable of CylinderPoint or (torus tuple, z) pairs.
    """
    packed: dict[int, int] = {}
    nd = N ** d
    z_min = z_max = None
    for s in sites:
        torus, z = (s.torus, s.z) if hasattr(s, "torus") else (s[0], s[1])
        idx = 0
        mul = 1
        for a in range(d):
            idx += (int(torus[a]) % N) * mul
            mul *= N
        packed[int(z) * nd + idx] = 0
        z_min = z if z_min is None else min(z_min, z)
        z_max = z if z_max is None else max(z_max, z)
    if not packed:
        return False
    return _slab_disconnected(packed, d, N, z_min - 1, z_max + 1)


def snapshot_disconnected(snap: SlabSnapshot, n: int | None = None) -> bool:
    if not snap.visited:
        return False
    return _slab_disconnected(snap.visited, snap.d, snap.N,
                              snap.z_min, snap.z_max, n)


@dataclass(frozen=True)
class ComponentLabeling:
    """Vacant-component labels on a slab, with virtual TOP/BOTTOM ids.

    Two vacant sites carry the same label iff a nearest-neighbor vacant
    path inside the slab joins them; the terminals take the labels of the
    fully vacant faces above and below the trace.
    """

    labels: dict[int, int]  # packed site -> component id
    top_id: int
    bottom_id: int

    def disconnected(self) -> bool:
        return self.top_id != self.bottom_id

    def same_component(self, key_a: int, key_b: int) -> bool:
        return self.labels[key_a] == self.labels[key_b]


def component_labeling(snap: SlabSnapshot, n: int | None = None) -> ComponentLabeling:
    """Label the vacant sites of the snapshot slab."""
    d, N = snap.d, snap.N
    nd = N ** d
    occ = _occupancy(snap.visited, d, N, snap.z_min, snap.z_max, n)
    labels, uf, _ = _label_with_wrap(~occ, wrap_axes=range(1, d + 1))
    flat = labels.reshape(-1)
    out: dict[int, int] = {}
    lo = snap.z_min * nd
    vacant_pos = np.nonzero(flat)[0]
    for pos in vacant_pos:
        out[int(pos) + lo] = uf.find(int(flat[pos]))
    top = uf.find(int(labels[(-1,) + (0,) * d]))
    bottom = uf.find(int(labels[(0,) + (0,) * d]))
    return ComponentLabeling(out, top, bottom)


@dataclass(frozen=True)
class DisconnectionResult:
    time: int | None          # exact first disconnecting step, None if censored
    censored: bool
    steps_run: int
    full_checks: int
    seed: int
    replica: int

    @property
    def value(self) -> int:
        if self.time is None:
            raise ValueError("censored run has no disconnection time")
        return self.time


def disconnection_time(config: WalkConfig, cadence: int | None = None,
                       growth: float = 2.0) -> DisconnectionResult:
    """Exact first step at which the trace disconnects the cylinder.

    Runs the walk with connectivity checks on a geometric cadence schedule
    (growth=1.0 keeps the spacing fixed), then binary-searches the exact
    time between the last negative and first positive check.  Because the
    trace only grows, the disconnection predicate is monotone in time and
    the search is exact regardless of the schedule.
    """
    d, N = config.d, config.N
    nd = N ** d
    traj = TrajectoryStore(config, keep_path=False, record=True)
    st = traj.state
    step = max(1, cadence if cadence is not None else nd)
    step_max = max(step, N ** (2 * d) // 4, 1)
    # a trace of n+1 sites cannot cut all N^d vertical lines before n = nd-1
    t_lo = nd - 2
    checks = 0
    while True:
        reason = traj.run(step)
        covered = len(st.torus_seen) == nd
        positive = False
        if covered:
            checks += 1
            positive = _slab_disconnected(st.visited, d, N,
                                          st.zmin - 1, st.zmax + 1)
        if positive:
            break
        t_lo = st.t
        if reason == 1:  # step cap
            return DisconnectionResult(None, True, st.t, checks,
                                       config.seed, config.replica)
        step = min(int(step * growth) or 1, step_max)
    t_hi = st.t
    z_lo, z_hi = st.zmin - 1, st.zmax + 1
    while t_lo + 1 < t_hi:
        mid = (t_lo + t_hi) // 2
        checks += 1
        if _slab_disconnected(st.visited, d, N, z_lo, z_hi, n=mid):
            t_hi = mid
        else:
            t_lo = mid
    return DisconnectionResult(t_hi, False, st.t, checks,
                               config.seed, config.replica)


# -- vacant segment census (event: every anchor and direction has a nearby
#    untouched segment) --------------------------------------------------------

def _runs_forward(vac: np.ndarray, axis: int) -> np.ndarray:
    """Length of the vacant run starting at each cell going +axis (no wrap)."""
    vm = np.moveaxis(vac, axis, 0)
    out = np.zeros(vm.shape, dtype=np.int32)
    om = out
    prev = np.zeros(vm.shape[1:], dtype=np.int32)
    for i in range(vm.shape[0] - 1, -1, -1):
        prev = np.where(vm[i], prev + 1, 0)
        om[i] = prev
    return np.moveaxis(out, 0, axis)


def _runs(vac: np.ndarray, axis: int, sign: int, wrap: bool) -> np.ndarray:
    if wrap:
        n = vac.shape[axis]
        v2 = np.concatenate([vac, vac], axis=axis)
        if sign > 0:
            r2 = _runs_forward(v2, axis)
            r = np.take(r2, range(n), axis=axis)
        else:
            r2 = _runs_forward(np.flip(v2, axis=axis), axis)
            r2 = np.flip(r2, axis=axis)
            r = np.take(r2, range(n, 2 * n), axis=axis)
        return np.minimum(r, n)
    if sign > 0:
        return _runs_forward(vac, axis)
    return np.flip(_runs_forward(np.flip(vac, axis=axis), axis), axis=axis)


def _window_any(need: np.ndarray, axis: int, sign: int, W: int,
                wrap: bool) -> np.ndarray:
    """any(need[x + i*sign*e] for i in range(W)) along the given axis."""
    out = np.zeros_like(need)
    for i in range(W):
        if wrap:
            out |= np.roll(need, -sign * i, axis=axis)
        else:
            out |= _shift(need, sign * i, axis)
    return out


@dataclass
class SegmentCensus:
    """Smallest vacant-segment offset per (anchor in the core block,
    direction); -1 marks a direction with no vacant segment within the
    offset window (exactly the pairs where the event fails)."""

    j: int
    K: float
    seg_steps: int
    window: int
    offsets: np.ndarray  # (2(d+1), core extent, N, ..., N), int8
    z_lo: int

    def ok(self) -> bool:
        return bool((self.offsets >= 0).all())

    def failures(self) -> int:
        return int((self.offsets < 0).sum())

    def offset_for(self, p, axis: int, sign: int) -> int | None:
        """Smallest vacant offset at anchor p in the signed direction,
        None where the event fails (p must lie in the core block)."""
        d = p.d
        diridx = 2 * axis + (0 if sign > 0 else 1)
        grid = (p.z - self.z_lo,) + tuple(p.torus[d - 1 - a] for a in range(d))
        val = int(self.offsets[(diridx,) + grid])
        return None if val < 0 else val


def segment_census(visited: dict[int, int], d: int, N: int, j: int, K: float,
                   n: int | None = None, with_census: bool = False,
                   directions: str = "signed"):
    """Event: every site of the core block has, in every axis direction, a
    fully vacant segment of seg_sites(K, N) steps starting within
    offsets_count(N) sites of it, w.r.t. the trace at time n.

    directions: "signed" quantifies over all 2(d+1) unit directions (the
    default reading); "positive" over the d+1 positive ones only, which
    makes the event weaker.  Returns (ok, census or None).
    """
    if directions not in ("signed", "positive"):
        raise ValueError("directions must be 'signed' or 'positive'")
    L = seg_sites(K, N)
    W = offsets_count(N)
    clo, chi = core_range(j, N)
    pad = W + L + 1
    z_lo, z_hi = clo - pad, chi + pad
    occ = _occupancy(visited, d, N, z_lo, z_hi, n)
    vac = ~occ
    a0, a1 = clo - z_lo, chi - z_lo
    ok = True
    cens = None
    signs = (1, -1) if directions == "signed" else (1,)
    if with_census:
        if directions != "signed":
            raise ValueError("census output is only defined for signed mode")
        cens = np.full((2 * (d + 1),) + (a1 - a0 + 1,) + (N,) * d, -1,
                       dtype=np.int8)
    for axis in range(d + 1):
        # grid axis 0 is the height; torus axis a sits at grid axis d - a
        gax = 0 if axis == d else d - axis
        wrap = axis != d
        for sign in signs:
            runs = _runs(vac, gax, sign, wrap)
            need = runs >= L + 1
            good = _window_any(need, gax, sign, W, wrap)
            core_good = good[a0:a1 + 1]
            if not core_good.all():
                ok = False
                if not with_census:
                    return False, None
            if with_census:
                filled = np.full(core_good.shape, -1, dtype=np.int8)
                for i in range(W):
                    sh = np.roll(need, -sign * i, axis=gax) if wrap else \
                        _shift(need, sign * i, gax)
                    sh = sh[a0:a1 + 1]
                    filled = np.where((filled < 0) & sh, np.int8(i), filled)
                cens[2 * axis + (0 if sign > 0 else 1)] = filled
    if with_census:
        census = SegmentCensus(j, K, L, W, cens, clo)
        return census.ok(), census
    return ok, None


def _shift(arr: np.ndarray, k: int, axis: int) -> np.ndarray:
    """np.roll without wraparound; vacated cells are False/0."""
    if k == 0:
        return arr
    out = np.zeros_like(arr)
    src = [slice(None)] * arr.ndim
    dst = [slice(None)] * arr.ndim
    if k > 0:
        src[axis] = slice(k, None)
        dst[axis] = slice(None, -k)
    else:
        src[axis] = slice(None, k)
        dst[axis] = slice(-k, None)
    out[tuple(dst)] = arr[tuple(src)]
    return out


# -- planar component event (each 2-plane section of the core block has at
#    most one large vacant component) ------------------------------------------

def _circular_diameter(values: np.ndarray, N: int) -> int:
    vals = np.unique(values)
    if len(vals) <= 1:
        return 0
    diff = np.abs(vals[:, None] - vals[None, :])
    return int(np.minimum(diff, N - diff).max())


def _section_big_components(section_vac: np.ndarray, wrap_mask,
                            L: int) -> int:
    """Number of connected components of a 2-d section whose l-infinity
    diameter is at least L (wrap_mask flags circular axes)."""
    wrap_axes = [ax for ax in (0, 1) if wrap_mask[ax]]
    labels, uf, n_labels = _label_with_wrap(section_vac, wrap_axes)
    if n_labels == 0:
        return 0
    roots: dict[int, list] = {}
    ys, xs = np.nonzero(labels)
    labs = labels[ys, xs]
    order = np.argsort(labs, kind="stable")
    ys, xs, labs = ys[order], xs[order], labs[order]
    bounds = np.searchsorted(labs, np.arange(1, n_labels + 2))
    big_roots: set[int] = set()
    for lab in range(1, n_labels + 1):
        a, b = bounds[lab - 1], bounds[lab]
        if a == b:
            continue
        root = uf.find(lab)
        if root in roots:
            roots[root].append((ys[a:b], xs[a:b]))
        else:
            roots[root] = [(ys[a:b], xs[a:b])]
    for root, chunks in roots.items():
        cy = np.concatenate([c[0] for c in chunks])
        cx = np.concatenate([c[1] for c in chunks])
        diam = 0
        for axis, coords in ((0, cy), (1, cx)):
            if wrap_mask[axis]:
                diam = max(diam, _circular_diameter(coords, section_vac.shape[axis]))
            else:
                diam = max(diam, int(coords.max() - coords.min()))
        if diam >= L:
            big_roots.add(root)
            if len(big_roots) > 1:
                return len(big_roots)
    return len(big_roots)


def planar_components_event(visited: dict[int, int], d: int, N: int, j: int,
                            K: float, ns, plane_samples: int | None = None,
                            sample_seed: int = 0) -> bool:
    """Event: at each trace time in ns and in every 2-plane section of the
    core block, the vacant components of diameter >= seg_sites(K, N) all
    coincide (at most one big component per section).

    plane_samples: when set, only this many sections are checked (sampled
    deterministically); the result is then a certified necessary condition
    rather than the full event.
    """
    L = seg_sites(K, N)
    clo, chi = core_range(j, N)
    planes = list(enumerate_planes(j, 2, N, d))
    if plane_samples is not None and plane_samples < len(planes):
        rng = np.random.default_rng(sample_seed)
        idx = rng.choice(len(planes), size=plane_samples, replace=False)
        planes = [planes[i] for i in sorted(idx)]
    for n in ns:
        occ = _occupancy(visited, d, N, clo, chi, n)
        vac = ~occ
        for plane in planes:
            section, wrap_mask = _plane_section(vac, plane, d, N, clo)
            if _section_big_components(section, wrap_mask, L) > 1:
                return False
    return True


def _plane_section(grid: np.ndarray, plane, d: int, N: int, z_lo: int):
    """Slice the (z, torus...) grid along a 2-plane; returns (2-d array,
    wrap mask per section axis)."""
    index: list = [slice(None)] * (d + 1)
    # grid axes: 0 is height, torus axis a sits at grid axis d - a
    for a in range(d):
        if a not in plane.axes:
            index[d - a] = plane.base[a]
    if d not in plane.axes:
        index[0] = plane.base[d] - z_lo
    section = grid[tuple(index)]
    # after slicing, remaining grid axes keep their relative order:
    # height first (if swept), then torus axes by descending index
    sec_axes = []
    if d in plane.axes:
        sec_axes.append(d)
    for a in sorted((a for a in plane.axes if a != d), reverse=True):
        sec_axes.append(a)
    wrap_mask = [ax != d for ax in sec_axes]
    return section, wrap_mask


# -- giant-frame event and segment linkage -------------------------------------

def check_giant(visited: dict[int, int], d: int, N: int, j: int, K: float,
                n_final: int, boundary_ns=None,
                plane_samples: int | None = None) -> dict:
    """Conjunction of the segment census and the planar component event at
    scale K.  boundary_ns defaults to just the final time."""
    ns = list(boundary_ns) if boundary_ns is not None else [n_final]
    seg_ok, _ = segment_census(visited, d, N, j, K, n=n_final)
    comp_ok = planar_components_event(visited, d, N, j, K, ns,
                                      plane_samples=plane_samples)
    return {"segments": seg_ok, "components": comp_ok,
            "giant": seg_ok and comp_ok}


@dataclass(frozen=True)
class LinkageVerdict:
    lines_ok: bool        # every axis line meeting the core block keeps a
                          # vacant segment of the reference length inside it
    unique_component: bool  # all such segments lie in one vacant component
    long_segment_starts: int


def segment_linkage(visited: dict[int, int], d: int, N: int, j: int,
                    L0: int, n: int | None = None) -> LinkageVerdict:
    """Linkage verdict on the vacant set inside the core block at trace
    time n, with reference segment length L0 steps (L0+1 sites): do all
    axis lines keep a vacant segment, and do all such segments sit in one
    vacant component?

    Requires L0 below the torus l-infinity diameter (floor(N/2)).
    """
    if L0 >= N // 2:
        raise ValueError("segment length must stay below the torus diameter")
    clo, chi = core_range(j, N)
    occ = _occupancy(visited, d, N, clo, chi, n)
    vac = ~occ
    labels, uf, _ = _label_with_wrap(vac, wrap_axes=range(1, d + 1))
    lines_ok = True
    starts_roots: set[int] = set()
    n_starts = 0
    for axis in range(d + 1):
        gax = 0 if axis == d else 1 + axis
        wrap = axis != d
        runs = _runs(vac, gax, 1, wrap)
        per_line_max = runs.max(axis=gax)
        if not (per_line_max >= L0 + 1).all():
            lines_ok = False
        starts = runs >= L0 + 1
        labs = np.unique(labels[starts])
        n_starts += int(starts.sum())
        for lab in labs:
            if lab > 0:
                starts_roots.add(uf.find(int(lab)))
    return LinkageVerdict(lines_ok, len(starts_roots) <= 1, n_starts)


# -- trajectory-level wrappers (resolve excursion indices to trace times) ------

def departure_time_of(traj: TrajectoryStore, j: int, t: float) -> int | None:
    """Trace time of the floor(t)-th departure around level j, None if not
    yet observed (fractional indices floor, index 0 is time 0)."""
    st = traj.state
    if st.exc_enabled and st.exc_j == j:
        return ledger_from_state(traj).departure_time(t)
    return excursions(traj, j).departure_time(t)


def check_V(traj: TrajectoryStore, K: float, j: int, t: float,
            with_census: bool = False):
    """Segment-census event at the floor(t)-th departure; None if censored."""
    n = departure_time_of(traj, j, t)
    if n is None:
        return None
    st = traj.state
    return segment_census(st.visited, st.d, st.N, j, K, n=n,
                          with_census=with_census)


def check_U(traj: TrajectoryStore, K: float, j: int, t: float,
            at_boundaries: bool = True,
            plane_samples: int | None = None) -> bool | None:
    """Planar component event up to the floor(t)-th departure; checked at
    each departure boundary by default, or at the final time only."""
    n = departure_time_of(traj, j, t)
    if n is None:
        return None
    st = traj.state
    if at_boundaries:
        if st.exc_enabled and st.exc_j == j:
            deps = ledger_from_state(traj).departures
        else:
            deps = excursions(traj, j).departures
        ns = [dep for dep in deps if dep <= n] or [n]
    else:
        ns = [n]
    return planar_components_event(st.visited, st.d, st.N, j, K, ns,
                                   plane_samples=plane_samples)


def check_G(traj: TrajectoryStore, j: int, t: float, K: float | None = None,
            at_boundaries: bool = True,
            plane_samples: int | None = None) -> dict | None:
    """Conjunction of the segment-census and planar-component events.

    K defaults to the c0 scale of the threshold report at this d, which
    only exists when the threshold condition holds there; pass K explicitly
    to run the event as a diagnostic at other d.
    """
    if K is None:
        from .crit import rho
        rep = rho(traj.state.d)
        if not rep.holds:
            raise ValueError("threshold condition fails at d="
                             f"{traj.state.d}; pass K explicitly")
        K = rep.c0
    n = departure_time_of(traj, j, t)
    if n is None:
        return None
    res_v = check_V(traj, K, j, t)
    ok_v = bool(res_v[0]) if res_v is not None else False
    ok_u = bool(check_U(traj, K, j, t, at_boundaries=at_boundaries,
                        plane_samples=plane_samples))
    return {"segments": ok_v, "components": ok_u, "giant": ok_v and ok_u,
            "K": K, "n": n}


# -- analysis record emission ---------------------------------------------------

ANALYSIS_RECORD_FIELDS = {
    "seed": int, "d": int, "N": int, "j": int,
    "u_or_t": (int, float), "event": str,
    "value": (bool, int, float, type(None)), "censored": bool,
}


def analysis_record(seed, d, N, j, u_or_t, event, value, censored=False) -> dict:
    rec = {"seed": int(seed), "d": int(d), "N": int(N), "j": int(j),
           "u_or_t": u_or_t, "event": str(event), "value": value,
           "censored": bool(censored)}
    validate_analysis_record(rec)
    return rec


def validate_analysis_record(rec: dict) -> None:
    for key, typ in ANALYSIS_RECORD_FIELDS.items():
        if key not in rec:
            raise ValueError(f"analysis record missing field {key!r}")
        if not isinstance(rec[key], typ):
            raise ValueError(f"analysis record field {key!r} has wrong type")
    extra = set(rec) - set(ANALYSIS_RECORD_FIELDS)
    if extra:
        raise ValueError(f"analysis record has unknown fields {sorted(extra)}")


def write_analysis_records(records, fp) -> None:
    for rec in records:
        validate_analysis_record(rec)
        fp.write(json.dumps(rec, sort_keys=True) + "\n")
