"""Seeded simple-random-walk simulation on the cylinder, on Z^nu, and the
derived observables: stopping times, excursion ledgers, level crossings,
level local times, and exit-time tails.

The walk law: at each step one of the 2(d+1) signed unit directions is
drawn uniformly (the torus directions wrap mod N, the last axis moves the
height).  Each step consumes exactly one value of the replica's stream, so
a (seed, replica) pair pins the trajectory bit-for-bit on every backend.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

import numpy as np

from . import backend
from .geometry import CylinderPoint, inner_range, outer_range
from .rng import Stream
from .state import CAP, DONE, WalkState

STARTS = ("origin", "uniform_block")

TRAJ_FORMAT = "cylwalk-trajectory"
TRAJ_VERSION = 1
_REC = struct.Struct("<Qq")


@dataclass(frozen=True)
class WalkConfig:
    """Parameters pinning one walk replica."""

    d: int
    N: int
    seed: int
    start: str = "origin"
    step_cap: int | None = None
    replica: int = 0

    def __post_init__(self):
        if self.start not in STARTS:
            raise ValueError(f"start must be one of {STARTS}")
        if self.d < 1 or self.N < 2:
            raise ValueError("need d >= 1 and N >= 2")


class TrajectoryStore:
    """A walk in progress: current site, visited map, optional full path.

    ``visited`` maps packed site keys to first-hit times; the trace of the
    walk up to time n is exactly the set of keys with first-hit <= n.  With
    keep_path=True every site is also retained in order, which the offline
    observable extractors (excursions, crossing times, ...) scan.
    """

    def __init__(self, config: WalkConfig, keep_path: bool = True,
                 record: bool = True,
                 rec_window: tuple[int, int] | None = None,
                 excursion_level: int | None = None,
                 excursion_target: int = 0,
                 track_levels: bool = False, level_target: int = 0,
                 track_tau: bool = False, tau_target: int = 0):
        self.config = config
        st = WalkState(config.d, config.N, config.seed, config.replica,
                       record=record, rec_window=rec_window,
                       step_cap=config.step_cap)
        if excursion_level is not None:
            st.exc_enabled = True
            st.exc_j = excursion_level
            st.exc_target = excursion_target
        if track_levels:
            st.lev_enabled = True
            st.lev_target = level_target
        if track_tau:
            st.tau_enabled = True
            st.tau_target = tau_target
        if config.start == "origin":
            torus = (0,) * config.d
            z = 0
        else:
            # the spread-out law: uniform start on the inner block at level 0
            s = Stream.resume(st.base, st.k)
            torus = tuple(s.below(config.N) for _ in range(config.d))
            z = s.below(2 * config.N + 1) - config.N
            st.k = s.k
        st.place(torus, z)
        self.state = st
        self.path: list[CylinderPoint] | None = None
        if keep_path:
            self.path = [CylinderPoint(tuple(st.torus), st.z)]

    # -- basic accessors ---------------------------------------------------

    @property
    def time(self) -> int:
        return self.state.t

    @property
    def position(self) -> CylinderPoint:
        return CylinderPoint(tuple(self.state.torus), self.state.z)

    def first_hit(self, p: CylinderPoint) -> int | None:
        key = self.state.pack(p.torus, p.z)
        return self.state.visited.get(key)

    def visited_count(self) -> int:
        return len(self.state.visited)

    # -- advancing ---------------------------------------------------------

    def advance(self, n: int = 1) -> int:
        """Take up to n single steps, keeping the path if retained.

        Returns the kernel stop reason (DONE unless the step cap or a
        tracked target fired).
        """
        reason = DONE
        for _ in range(n):
            reason = backend.run_steps(self.state, 1)
            if reason == CAP:
                break
            if self.path is not None:
                self.path.append(CylinderPoint(tuple(self.state.torus),
                                               self.state.z))
            if reason != DONE:
                break
        return reason

    def run(self, n: int) -> int:
        """Advance by up to n steps in one kernel burst (no path retention)."""
        if self.path is not None:
            raise ValueError("run() would not record the retained path; "
                             "use advance() or build with keep_path=False")
        return backend.run_steps(self.state, n)

    def heights(self) -> list[int]:
        if self.path is None:
            raise ValueError("path not retained")
        return [p.z for p in self.path]


def advance(traj: TrajectoryStore, n: int = 1) -> int:
    """Module-level alias of TrajectoryStore.advance."""
    return traj.advance(n)


# -- stopping times ---------------------------------------------------------

@dataclass(frozen=True)
class StopTimes:
    """Entrance/exit/hitting times; None marks 'not yet observed'."""

    entrance: int | None
    exit: int | None
    hitting: int | None


def entrance_exit_times(traj: TrajectoryStore, U) -> StopTimes:
    """First times in U (n >= 0), out of U (n >= 0), and back in U (n >= 1).

    U may be a set of CylinderPoint or a predicate on CylinderPoint.
    """
    member = U.__contains__ if isinstance(U, (set, frozenset, dict)) else U
    if traj.path is None:
        raise ValueError("path not retained")
    entrance = exit_ = hitting = None
    for n, p in enumerate(traj.path):
        inside = member(p)
        if entrance is None and inside:
            entrance = n
        if exit_ is None and not inside:
            exit_ = n
        if hitting is None and n >= 1 and inside:
            hitting = n
        if entrance is not None and exit_ is not None and hitting is not None:
            break
    return StopTimes(entrance, exit_, hitting)


# -- excursions --------------------------------------------------------------

@dataclass
class ExcursionLedger:
    """Interleaved return/departure times of the walk around one level.

    Returns are entries into the inner block, departures are the following
    exits from the outer block; index 0 is the conventional time 0, and a
    fractional index is floored.
    """

    j: int
    returns: list[int] = field(default_factory=list)
    departures: list[int] = field(default_factory=list)

    def completed(self) -> int:
        return len(self.departures)

    def return_time(self, t: float) -> int | None:
        k = int(t)
        if k == 0:
            return 0
        return self.returns[k - 1] if k <= len(self.returns) else None

    def departure_time(self, t: float) -> int | None:
        k = int(t)
        if k == 0:
            return 0
        return self.departures[k - 1] if k <= len(self.departures) else None


def excursions(traj: TrajectoryStore, j: int, k_max: int | None = None) -> ExcursionLedger:
    """Scan the retained path for the first k_max return/departure pairs
    around level j.

    Offline twin of the kernel's online machine (and the oracle used to
    test it): a return is the first time in the inner block after the
    previous departure, a departure the first exit from the outer block
    after that.
    """
    if traj.path is None:
        raise ValueError("path not retained")
    N = traj.config.N
    ilo, ihi = inner_range(j, N)
    olo, ohi = outer_range(j, N)
    led = ExcursionLedger(j)
    waiting_return = True
    for n, p in enumerate(traj.path):
        if waiting_return:
            if ilo <= p.z <= ihi:
                led.returns.append(n)
                waiting_return = False
        else:
            if not olo <= p.z <= ohi:
                led.departures.append(n)
                waiting_return = True
                if k_max is not None and len(led.departures) >= k_max:
                    break
    return led


def ledger_from_state(traj: TrajectoryStore) -> ExcursionLedger:
    """The kernel-tracked ledger of a trajectory built with excursion_level."""
    st = traj.state
    if not st.exc_enabled:
        raise ValueError("trajectory was not tracking excursions")
    return ExcursionLedger(st.exc_j, list(st.exc_returns), list(st.exc_departures))


# -- level crossings and local time ------------------------------------------

def tau_times(traj: TrajectoryStore) -> list[int]:
    """Times of successive height displacements by exactly N.

    The first entry is the first visit to a height in N*Z; each later entry
    is the first time the height differs by N from its value at the
    previous entry.
    """
    if traj.path is None:
        raise ValueError("path not retained")
    N = traj.config.N
    out: list[int] = []
    anchor: int | None = None
    for n, p in enumerate(traj.path):
        if anchor is None:
            if p.z % N == 0:
                anchor = p.z
                out.append(n)
        elif abs(p.z - anchor) == N:
            anchor = p.z
            out.append(n)
    return out


@dataclass(frozen=True)
class LevelLocalTime:
    """Visit counts of the level skeleton: counts[l] is the number of
    crossing indices n <= t whose height is l*N."""

    counts: dict[int, int]
    t: int

    def total(self) -> int:
        return sum(self.counts.values())

    def sup(self) -> int:
        return max(self.counts.values()) if self.counts else 0


def level_local_time(traj: TrajectoryStore, t: float) -> LevelLocalTime | None:
    """Local time of the level skeleton up to crossing index floor(t);
    None while the required crossing has not happened yet (censored)."""
    k = int(t)
    taus = tau_times(traj)
    if len(taus) < k + 1:
        return None
    N = traj.config.N
    counts: dict[int, int] = {}
    for n in taus[:k + 1]:
        lev = traj.path[n].z // N
        counts[lev] = counts.get(lev, 0) + 1
    return LevelLocalTime(counts, k)


def local_time_counts_from_levels(levels, k: int) -> LevelLocalTime:
    """LevelLocalTime from a kernel-recorded level sequence."""
    counts: dict[int, int] = {}
    for lev in levels[:k + 1]:
        counts[lev] = counts.get(lev, 0) + 1
    return LevelLocalTime(counts, k)


# -- walks on Z^nu ------------------------------------------------------------

def walk_z_nu(nu: int, seed: int, horizon: int, replica: int = 0) -> np.ndarray:
    """A simple-random-walk path on Z^nu: (horizon+1) x nu positions,
    starting at the origin, one stream value per step."""
    if nu < 1:
        raise ValueError("nu must be >= 1")
    s = Stream(seed, replica)
    u = s.batch_u64(horizon)
    r = u % np.uint64(2 * nu)
    axis = (r >> np.uint64(1)).astype(np.int64)
    sign = 1 - 2 * (r & np.uint64(1)).astype(np.int64)
    steps = np.zeros((horizon, nu), dtype=np.int64)
    steps[np.arange(horizon), axis] = sign
    path = np.vstack([np.zeros((1, nu), dtype=np.int64), np.cumsum(steps, axis=0)])
    return path


# -- exit-time tails -----------------------------------------------------------

@dataclass(frozen=True)
class TailFit:
    slope: float
    intercept: float
    r2: float
    s_grid: np.ndarray
    log_survival: np.ndarray


@dataclass(frozen=True)
class ExitTailStats:
    d: int
    N: int
    replicas: int
    tau1: np.ndarray
    exit_times: np.ndarray
    tau_fit: TailFit
    exit_fit: TailFit


def _tail_fit(samples: np.ndarray, scale: float,
              s_grid=np.arange(1.0, 6.01, 0.5)) -> TailFit:
    x = samples / scale
    surv = np.array([(x > s).mean() for s in s_grid])
    keep = surv > 0
    s = s_grid[keep]
    ls = np.log(surv[keep])
    if len(s) < 3:
        return TailFit(float("nan"), float("nan"), float("nan"), s, ls)
    slope, intercept = np.polyfit(s, ls, 1)
    pred = slope * s + intercept
    ss_res = float(((ls - pred) ** 2).sum())
    ss_tot = float(((ls - ls.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else float("nan")
    return TailFit(float(slope), float(intercept), r2, s, ls)


def exit_tail_stats(d: int, N: int, replicas: int, seed: int,
                    cap: int = 10 ** 9) -> ExitTailStats:
    """Simulate the height component from the origin and fit the
    exponential tails of (outer-block exit time)/N^2 and of (first level
    crossing)/N^2."""
    tau1, texit = backend.z_exit_times(d, N, seed, replicas, cap=cap)
    n2 = float(N * N)
    return ExitTailStats(d, N, replicas, tau1, texit,
                         _tail_fit(tau1, n2), _tail_fit(texit, n2))


# -- trajectory dump (binary record stream + JSON header) ----------------------

def write_trajectory(traj: TrajectoryStore, fp) -> None:
    """Dump the retained path: one JSON header line, then little-endian
    records (step index: uint64, packed site: int64).  Packed site is
    z * N**d + sum(torus[a] * N**a)."""
    if traj.path is None:
        raise ValueError("path not retained")
    cfg = traj.config
    header = {
        "format": TRAJ_FORMAT,
        "version": TRAJ_VERSION,
        "d": cfg.d,
        "N": cfg.N,
        "seed": cfg.seed,
        "replica": cfg.replica,
        "count": len(traj.path),
    }
    fp.write((json.dumps(header, sort_keys=True) + "\n").encode())
    st = traj.state
    for n, p in enumerate(traj.path):
        fp.write(_REC.pack(n, st.pack(p.torus, p.z)))


def read_trajectory(fp):
    """Read a trajectory dump; returns (header dict, list of CylinderPoint)."""
    header = json.loads(fp.readline().decode())
    if header.get("format") != TRAJ_FORMAT:
        raise ValueError("not a trajectory dump")
    if header.get("version") != TRAJ_VERSION:
        raise ValueError(f"unsupported trajectory version {header.get('version')}")
    d, N, count = header["d"], header["N"], header["count"]
    nd = N ** d
    sites = []
    for _ in range(count):
        rec = fp.read(_REC.size)
        n, key = _REC.unpack(rec)
        z, idx = divmod(key, nd)
        torus = []
        for _ in range(d):
            idx, r = divmod(idx, N)
            torus.append(r)
        sites.append(CylinderPoint(tuple(torus), z))
    return header, sites
