"""Mutable state of one cylinder-walk replica.

Both kernel backends (the compiled extension and the pure-Python fallback)
operate on this object in place: they read the fields into locals, run the
hot loop, and write the fields back.  Keeping the state in one plain Python
object is what lets the two backends be swapped without touching callers.

Sites are packed into a single integer key ``z * N**d + torus_index`` with
``torus_index = sum(torus[a] * N**a)``; Python's floor division makes the
packing invertible for negative heights.
"""

from __future__ import annotations

from .rng import stream_base

# stop reasons returned by the kernels
DONE = 0          # requested number of steps consumed
CAP = 1           # step_cap reached
EXC_TARGET = 2    # requested excursion count completed
TAU_TARGET = 3    # requested number of level crossings observed

WAIT_RETURN = 0
WAIT_DEPART = 1

# packing must stay well inside int64 for the compiled kernel
_PACK_LIMIT = 1 << 62


class WalkState:
    __slots__ = (
        "d", "N", "nd", "torus", "tidx", "z", "t",
        "base", "k",
        "record", "rec_lo", "rec_hi", "visited", "torus_seen",
        "zmin", "zmax", "step_cap",
        "exc_enabled", "exc_j", "exc_phase", "exc_returns", "exc_departures",
        "exc_target",
        "lev_enabled", "lev_phase", "lev_dcount", "lev_target", "lev_dtime",
        "tau_enabled", "tau_have_anchor", "tau_anchor", "tau_levels",
        "tau_target",
    )

    def __init__(self, d: int, N: int, seed: int, replica: int = 0,
                 record: bool = False,
                 rec_window: tuple[int, int] | None = None,
                 step_cap: int | None = None):
        if d < 1 or N < 2:
            raise ValueError("need d >= 1 and N >= 2")
        self.d = d
        self.N = N
        self.nd = N ** d
        if step_cap is not None and (step_cap + 2 * N) * self.nd >= _PACK_LIMIT:
            raise ValueError("step_cap too large for packed site keys")
        self.torus = [0] * d
        self.tidx = 0
        self.z = 0
        self.t = 0
        self.base = stream_base(seed, replica)
        self.k = 0
        self.record = record
        if rec_window is None:
            self.rec_lo, self.rec_hi = -(1 << 50), 1 << 50
        else:
            self.rec_lo, self.rec_hi = rec_window
        self.visited: dict[int, int] = {}
        self.torus_seen: set[int] = set()
        self.zmin = 0
        self.zmax = 0
        self.step_cap = step_cap
        self.exc_enabled = False
        self.exc_j = 0
        self.exc_phase = WAIT_RETURN
        self.exc_returns: list[int] = []
        self.exc_departures: list[int] = []
        self.exc_target = 0
        self.lev_enabled = False
        self.lev_phase: dict[int, int] = {}
        self.lev_dcount: dict[int, int] = {}
        self.lev_target = 0
        self.lev_dtime: dict[int, int] = {}
        self.tau_enabled = False
        self.tau_have_anchor = False
        self.tau_anchor = 0
        self.tau_levels: list[int] = []
        self.tau_target = 0

    # -- initialisation of the start site ---------------------------------

    def place(self, torus, z: int) -> None:
        """Put the walker at a site and run the time-0 bookkeeping."""
        N, d = self.N, self.d
        self.torus = [int(v) % N for v in torus]
        self.tidx = 0
        mul = 1
        for a in range(d):
            self.tidx += self.torus[a] * mul
            mul *= N
        self.z = int(z)
        self.zmin = self.zmax = self.z
        if self.record and self.rec_lo <= self.z <= self.rec_hi:
            self.visited[self.z * self.nd + self.tidx] = 0
            self.torus_seen.add(self.tidx)
        if self.tau_enabled and self.z % N == 0:
            self.tau_have_anchor = True
            self.tau_anchor = self.z
            self.tau_levels.append(self.z // N)
        if self.exc_enabled:
            lo = (self.exc_j - 1) * N
            hi = (self.exc_j + 1) * N
            if lo <= self.z <= hi:
                self.exc_phase = WAIT_DEPART
                self.exc_returns.append(0)
        if self.lev_enabled:
            # every level whose inner block holds the start height opens
            # an excursion at time 0
            q, r = divmod(self.z, N)
            js = (q - 1, q, q + 1) if r == 0 else (q, q + 1)
            for j in js:
                self.lev_phase[j] = WAIT_DEPART

    def pack(self, torus, z: int) -> int:
        idx = 0
        mul = 1
        for a in range(self.d):
            idx += (int(torus[a]) % self.N) * mul
            mul *= self.N
        return int(z) * self.nd + idx

    def unpack(self, key: int) -> tuple[tuple[int, ...], int]:
        z, idx = divmod(key, self.nd)
        torus = []
        for _ in range(self.d):
            idx, r = idx // self.N, idx % self.N
            torus.append(r)
        return tuple(torus), z

    def position(self) -> tuple[tuple[int, ...], int]:
        return tuple(self.torus), self.z
