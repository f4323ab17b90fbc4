"""Pure-Python walk kernels.

Reference implementation of the hot loops; the compiled extension in
``_kernels.pyx`` mirrors these semantics exactly (same stream protocol,
same stream-counter consumption), so the two backends produce bit-identical
states.  This module is selected at import time when the extension is not
built; it is slower by roughly two orders of magnitude but complete.
"""

from __future__ import annotations

import numpy as np

from .rng import GAMMA, MASK64, Stream
from .state import CAP, DONE, EXC_TARGET, TAU_TARGET, WAIT_DEPART, WAIT_RETURN

IMPL = "python"

_C1 = 0xBF58476D1CE4E5B9
_C2 = 0x94D049BB133111EB


def run_steps(st, n_steps: int) -> int:
    """Advance the walk by up to n_steps; returns the stop reason."""
    d, N, nd = st.d, st.N, st.nd
    ndirs = 2 * (d + 1)
    torus = st.torus
    tidx = st.tidx
    z = st.z
    t = st.t
    base = st.base
    k = st.k
    record = st.record
    rec_lo, rec_hi = st.rec_lo, st.rec_hi
    visited = st.visited
    torus_seen = st.torus_seen
    zmin, zmax = st.zmin, st.zmax
    cap = st.step_cap
    exc_on = st.exc_enabled
    lev_on = st.lev_enabled
    tau_on = st.tau_enabled
    muls = [N ** a for a in range(d)]
    reason = DONE

    for _ in range(n_steps):
        if cap is not None and t >= cap:
            reason = CAP
            break
        k += 1
        x = (base + k * GAMMA) & MASK64
        x = ((x ^ (x >> 30)) * _C1) & MASK64
        x = ((x ^ (x >> 27)) * _C2) & MASK64
        u = x ^ (x >> 31)
        r = u % ndirs
        axis = r >> 1
        up = not (r & 1)
        t += 1
        if axis < d:
            old = torus[axis]
            new = old + 1 if up else old - 1
            if new == N:
                new = 0
                tidx -= (N - 1) * muls[axis]
            elif new == -1:
                new = N - 1
                tidx += (N - 1) * muls[axis]
            else:
                tidx += muls[axis] if up else -muls[axis]
            torus[axis] = new
        else:
            z = z + 1 if up else z - 1
            if z < zmin:
                zmin = z
            elif z > zmax:
                zmax = z
            if tau_on:
                if st.tau_have_anchor:
                    if z - st.tau_anchor in (N, -N):
                        st.tau_anchor = z
                        st.tau_levels.append(z // N)
                        if st.tau_target and len(st.tau_levels) > st.tau_target:
                            reason = TAU_TARGET
                elif z % N == 0:
                    st.tau_have_anchor = True
                    st.tau_anchor = z
                    st.tau_levels.append(z // N)
            if (exc_on or lev_on) and z % N == 0:
                q = z // N
                rj = q + 1 if up else q - 1
                dj = q - 2 if up else q + 2
                if exc_on:
                    if st.exc_j == rj and st.exc_phase == WAIT_RETURN:
                        st.exc_phase = WAIT_DEPART
                        st.exc_returns.append(t)
                    elif st.exc_j == dj and st.exc_phase == WAIT_DEPART:
                        st.exc_phase = WAIT_RETURN
                        st.exc_departures.append(t)
                        if st.exc_target and len(st.exc_departures) >= st.exc_target:
                            reason = EXC_TARGET
                if lev_on:
                    ph = st.lev_phase
                    if ph.get(rj, WAIT_RETURN) == WAIT_RETURN:
                        ph[rj] = WAIT_DEPART
                    if ph.get(dj, WAIT_RETURN) == WAIT_DEPART:
                        ph[dj] = WAIT_RETURN
                        c = st.lev_dcount.get(dj, 0) + 1
                        st.lev_dcount[dj] = c
                        if c == st.lev_target:
                            st.lev_dtime[dj] = t
        if record and rec_lo <= z <= rec_hi:
            key = z * nd + tidx
            if key not in visited:
                visited[key] = t
                torus_seen.add(tidx)
        if reason != DONE:
            break

    st.tidx = tidx
    st.z = z
    st.t = t
    st.k = k
    st.zmin, st.zmax = zmin, zmax
    return reason


def walk_until_plane_or_exit(d, N, base, k, torus0, z0, fixed, z_lo, z_hi,
                             max_steps):
    """Walk until the site lies on the plane (all fixed coordinates match),
    the height leaves [z_lo, z_hi], or max_steps elapse.

    fixed: list of (axis, value); axis d means the height coordinate.
    Returns (outcome, steps, k): outcome 0 = plane hit, 1 = strip exited,
    2 = step cap.
    """
    ndirs = 2 * (d + 1)
    torus = [v % N for v in torus0]
    z = z0
    t = 0
    while t < max_steps:
        k += 1
        x = (base + k * GAMMA) & MASK64
        x = ((x ^ (x >> 30)) * _C1) & MASK64
        x = ((x ^ (x >> 27)) * _C2) & MASK64
        u = x ^ (x >> 31)
        r = u % ndirs
        axis = r >> 1
        sign = 1 - ((r & 1) << 1)
        if axis < d:
            torus[axis] = (torus[axis] + sign) % N
        else:
            z += sign
        t += 1
        if z < z_lo or z > z_hi:
            return 1, t, k
        on_plane = True
        for a, v in fixed:
            c = z if a == d else torus[a]
            if c != v:
                on_plane = False
                break
        if on_plane:
            return 0, t, k
    return 2, t, k


def z_exit_times(d, N, seed, replicas, replica0=0, cap=10 ** 9, chunk=4096):
    """First-crossing and strip-exit times of the height component.

    For each replica, starting at height 0, returns the first time the
    height reaches +-N (first level crossing) and the first time it leaves
    the open strip (-(2N-1), 2N-1) ... i.e. hits +-2N (departure from the
    outer block at level 0).  Only the height marginal is simulated; each
    step consumes exactly one stream value, exactly as the full-cylinder
    kernel would.
    """
    ndirs = 2 * (d + 1)
    tau1 = np.empty(replicas, dtype=np.int64)
    texit = np.empty(replicas, dtype=np.int64)
    exit_abs = 2 * N
    for i in range(replicas):
        s = Stream(seed, replica0 + i)
        z = 0
        t = 0
        got_tau = False
        while t < cap:
            n = min(chunk, cap - t)
            u = s.batch_u64(n)
            r = u % np.uint64(ndirs)
            axis = r >> np.uint64(1)
            dz = np.where(axis == d, 1 - 2 * (r & np.uint64(1)).astype(np.int64), 0)
            zs = z + np.cumsum(dz)
            if not got_tau:
                hits = np.nonzero(np.abs(zs) >= N)[0]
                if hits.size:
                    got_tau = True
                    tau1[i] = t + hits[0] + 1
            outs = np.nonzero(np.abs(zs) >= exit_abs)[0]
            if outs.size:
                texit[i] = t + outs[0] + 1
                break
            z = int(zs[-1])
            t += n
        else:
            if not got_tau:
                tau1[i] = cap
            texit[i] = cap
    return tau1, texit


def count_star_saws(n: int) -> int:
    """Exact number of n-step self-avoiding king-move paths on Z^2 from the
    origin, by depth-first enumeration."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return 1
    dirs = [(dx, dy) for dx in (-1, 0, 1) for dy in (-1, 0, 1)
            if (dx, dy) != (0, 0)]
    seen = {(0, 0)}
    count = 0

    def dfs(p, depth):
        nonlocal count
        if depth == n:
            count += 1
            return
        for dx, dy in dirs:
            q = (p[0] + dx, p[1] + dy)
            if q not in seen:
                seen.add(q)
                dfs(q, depth + 1)
                seen.remove(q)

    dfs((0, 0), 0)
    return count


def q_return_walks(nu, horizon, replicas, seed, theta=6, batch=1 << 19):
    """Return times of walks on Z^nu, censored at the horizon.

    Exact leapfrog simulation: a walk at L1 distance r cannot return in
    fewer than r steps, so its displacement over min(r-1, remaining) steps
    is drawn in one shot from the multinomial step-count law; returns can
    only occur during the single-step phase near the origin, where they are
    detected at the exact step.  Returns an int64 array of first-return
    times, -1 where the walk did not return within the horizon.
    """
    rng = np.random.default_rng(seed)
    pvals = np.full(2 * nu, 1.0 / (2 * nu))
    rt = np.full(replicas, -1, dtype=np.int64)
    done = 0
    while done < replicas:
        m = min(batch, replicas - done)
        ids = np.arange(done, done + m)
        done += m
        pos = np.zeros((m, nu), dtype=np.int64)
        t = np.ones(m, dtype=np.int64)
        kfirst = rng.integers(0, 2 * nu, size=m)
        pos[np.arange(m), kfirst >> 1] = 1 - 2 * (kfirst & 1)
        while pos.shape[0]:
            l1 = np.abs(pos).sum(axis=1)
            alive = l1 <= horizon - t
            if not alive.all():
                pos, t, l1, ids = pos[alive], t[alive], l1[alive], ids[alive]
                if not pos.shape[0]:
                    break
            near = l1 <= theta
            nn = int(near.sum())
            if nn:
                idx = np.nonzero(near)[0]
                kk = rng.integers(0, 2 * nu, size=nn)
                pos[idx, kk >> 1] += (1 - 2 * (kk & 1)).astype(np.int64)
                t[idx] += 1
                hit = ~pos[idx].any(axis=1)
                if hit.any():
                    rt[ids[idx[hit]]] = t[idx[hit]]
                    keep = np.ones(pos.shape[0], dtype=bool)
                    keep[idx[hit]] = False
                    pos, t, near, ids = pos[keep], t[keep], near[keep], ids[keep]
                    if not pos.shape[0]:
                        break
            far = ~near
            if far.any():
                idx = np.nonzero(far)[0]
                kk = np.minimum(np.abs(pos[idx]).sum(axis=1) - 1,
                                horizon - t[idx])
                counts = rng.multinomial(kk, pvals)
                pos[idx] += counts[:, 0::2] - counts[:, 1::2]
                t[idx] += kk
    return rt
