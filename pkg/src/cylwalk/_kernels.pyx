# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled walk kernels.

Mirror of ``_kernels_py``: identical stream protocol and stream-counter
consumption, so a WalkState advanced here is bit-identical to one advanced
by the pure-Python backend.  The return-probability kernel additionally
uses numpy's C-level binomial sampler for the leapfrog jumps.
"""

import numpy as np

cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.stdint cimport int64_t, uint64_t
from numpy.random cimport bitgen_t
from numpy.random.c_distributions cimport binomial_t, random_binomial

from .state import CAP, DONE, EXC_TARGET, TAU_TARGET, WAIT_DEPART, WAIT_RETURN

cdef extern from *:
    """
    static inline int cw_popcount(unsigned long long x) {
        return __builtin_popcountll(x);
    }
    """
    int cw_popcount(unsigned long long x) nogil

IMPL = "cython"

DEF MAXDIM = 24

cdef uint64_t GAMMA = 0x9E3779B97F4A7C15ULL
cdef uint64_t C1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t C2 = 0x94D049BB133111EBULL

cdef int _DONE = DONE
cdef int _CAP = CAP
cdef int _EXC = EXC_TARGET
cdef int _TAU = TAU_TARGET
cdef int _WAIT_R = WAIT_RETURN
cdef int _WAIT_D = WAIT_DEPART


cdef inline uint64_t mix64(uint64_t x) nogil:
    x = (x ^ (x >> 30)) * C1
    x = (x ^ (x >> 27)) * C2
    return x ^ (x >> 31)


def run_steps(st, long long n_steps):
    """Advance the walk by up to n_steps; returns the stop reason."""
    cdef int d = st.d
    cdef int64_t N = st.N
    cdef int64_t nd = st.nd
    cdef int ndirs = 2 * (d + 1)
    cdef int64_t torus[MAXDIM]
    cdef int64_t muls[MAXDIM]
    cdef int a
    if d > MAXDIM:
        raise ValueError("torus dimension too large for compiled kernel")
    tl = st.torus
    cdef int64_t mul = 1
    for a in range(d):
        torus[a] = tl[a]
        muls[a] = mul
        mul *= N
    cdef int64_t tidx = st.tidx
    cdef int64_t z = st.z
    cdef int64_t t = st.t
    cdef uint64_t base = st.base
    cdef uint64_t k = st.k
    cdef bint record = st.record
    cdef int64_t rec_lo = st.rec_lo
    cdef int64_t rec_hi = st.rec_hi
    visited = st.visited
    torus_seen = st.torus_seen
    cdef int64_t zmin = st.zmin
    cdef int64_t zmax = st.zmax
    cdef bint has_cap = st.step_cap is not None
    cdef int64_t cap = st.step_cap if has_cap else 0
    cdef bint exc_on = st.exc_enabled
    cdef bint lev_on = st.lev_enabled
    cdef bint tau_on = st.tau_enabled
    cdef bint tau_anchored = st.tau_have_anchor
    cdef int64_t tau_anchor = st.tau_anchor
    cdef int64_t tau_target = st.tau_target
    tau_levels = st.tau_levels
    cdef int64_t exc_j = st.exc_j if exc_on else 0
    cdef int exc_phase = st.exc_phase if exc_on else 0
    exc_returns = st.exc_returns
    exc_departures = st.exc_departures
    cdef int64_t exc_target = st.exc_target
    lev_phase = st.lev_phase
    lev_dcount = st.lev_dcount
    cdef int64_t lev_target = st.lev_target
    lev_dtime = st.lev_dtime

    cdef int reason = _DONE
    cdef long long i
    cdef uint64_t u
    cdef int64_t r, axis, old, newc, q, rj, dj, key, dz, c
    cdef bint up

    for i in range(n_steps):
        if has_cap and t >= cap:
            reason = _CAP
            break
        k += 1
        u = mix64(base + k * GAMMA)
        r = <int64_t> (u % <uint64_t> ndirs)
        axis = r >> 1
        up = (r & 1) == 0
        t += 1
        if axis < d:
            old = torus[axis]
            newc = old + 1 if up else old - 1
            if newc == N:
                newc = 0
                tidx -= (N - 1) * muls[axis]
            elif newc == -1:
                newc = N - 1
                tidx += (N - 1) * muls[axis]
            else:
                tidx += muls[axis] if up else -muls[axis]
            torus[axis] = newc
        else:
            z = z + 1 if up else z - 1
            if z < zmin:
                zmin = z
            elif z > zmax:
                zmax = z
            if tau_on:
                if tau_anchored:
                    dz = z - tau_anchor
                    if dz == N or dz == -N:
                        # anchors stay on multiples of N, so this division
                        # is exact and sign-safe
                        tau_anchor = z
                        tau_levels.append(z / N)
                        if tau_target > 0 and len(tau_levels) > tau_target:
                            reason = _TAU
                elif z % N == 0:
                    tau_anchored = True
                    tau_anchor = z
                    tau_levels.append(z / N)
            if (exc_on or lev_on) and z % N == 0:
                q = z / N
                rj = q + 1 if up else q - 1
                dj = q - 2 if up else q + 2
                if exc_on:
                    if exc_j == rj and exc_phase == _WAIT_R:
                        exc_phase = _WAIT_D
                        exc_returns.append(t)
                    elif exc_j == dj and exc_phase == _WAIT_D:
                        exc_phase = _WAIT_R
                        exc_departures.append(t)
                        if exc_target > 0 and len(exc_departures) >= exc_target:
                            reason = _EXC
                if lev_on:
                    if lev_phase.get(rj, _WAIT_R) == _WAIT_R:
                        lev_phase[rj] = _WAIT_D
                    if lev_phase.get(dj, _WAIT_R) == _WAIT_D:
                        lev_phase[dj] = _WAIT_R
                        c = lev_dcount.get(dj, 0) + 1
                        lev_dcount[dj] = c
                        if c == lev_target:
                            lev_dtime[dj] = t
        if record and rec_lo <= z <= rec_hi:
            key = z * nd + tidx
            if key not in visited:
                visited[key] = t
                torus_seen.add(tidx)
        if reason != _DONE:
            break

    for a in range(d):
        tl[a] = torus[a]
    st.tidx = tidx
    st.z = z
    st.t = t
    st.k = k
    st.zmin = zmin
    st.zmax = zmax
    if exc_on:
        st.exc_phase = exc_phase
    if tau_on:
        st.tau_have_anchor = tau_anchored
        st.tau_anchor = tau_anchor
    return reason


def walk_until_plane_or_exit(int d, int64_t N, object base_obj, object k_obj,
                             torus0, int64_t z0, fixed, int64_t z_lo,
                             int64_t z_hi, long long max_steps):
    """See _kernels_py.walk_until_plane_or_exit."""
    cdef uint64_t base = base_obj
    cdef uint64_t k = k_obj
    cdef int ndirs = 2 * (d + 1)
    cdef int64_t torus[MAXDIM]
    cdef int64_t fax[MAXDIM]
    cdef int64_t fval[MAXDIM]
    cdef int nfix = len(fixed)
    cdef int a, fi
    if d > MAXDIM or nfix > MAXDIM:
        raise ValueError("dimension too large for compiled kernel")
    for a in range(d):
        torus[a] = torus0[a] % N
    for fi in range(nfix):
        fax[fi] = fixed[fi][0]
        fval[fi] = fixed[fi][1]
    cdef int64_t z = z0
    cdef long long t = 0
    cdef uint64_t u
    cdef int64_t r, axis, sign, cc
    cdef bint on_plane
    while t < max_steps:
        k += 1
        u = mix64(base + k * GAMMA)
        r = <int64_t> (u % <uint64_t> ndirs)
        axis = r >> 1
        sign = 1 - ((r & 1) << 1)
        if axis < d:
            torus[axis] = (torus[axis] + sign + N) % N
        else:
            z += sign
        t += 1
        if z < z_lo or z > z_hi:
            return 1, t, k
        on_plane = True
        for fi in range(nfix):
            cc = z if fax[fi] == d else torus[fax[fi]]
            if cc != fval[fi]:
                on_plane = False
                break
        if on_plane:
            return 0, t, k
    return 2, t, k


def z_exit_times(int d, int64_t N, object seed, long long replicas,
                 long long replica0=0, long long cap=10 ** 9,
                 long long chunk=4096):
    """See _kernels_py.z_exit_times (chunk is ignored here)."""
    from .rng import stream_base
    cdef cnp.ndarray[cnp.int64_t, ndim=1] tau1 = np.empty(replicas, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] texit = np.empty(replicas, dtype=np.int64)
    cdef int ndirs = 2 * (d + 1)
    cdef int64_t exit_abs = 2 * N
    cdef long long i, t
    cdef uint64_t base, k, u
    cdef int64_t z, r
    cdef bint got_tau
    for i in range(replicas):
        base = stream_base(seed, replica0 + i)
        k = 0
        z = 0
        t = 0
        got_tau = False
        while t < cap:
            k += 1
            u = mix64(base + k * GAMMA)
            r = <int64_t> (u % <uint64_t> ndirs)
            if (r >> 1) == d:
                z += 1 - ((r & 1) << 1)
            t += 1
            if not got_tau and (z >= N or z <= -N):
                got_tau = True
                tau1[i] = t
            if z >= exit_abs or z <= -exit_abs:
                texit[i] = t
                break
        else:
            if not got_tau:
                tau1[i] = cap
            texit[i] = cap
    return tau1, texit


def count_star_saws(int n):
    """Exact number of n-step self-avoiding king-move paths on Z^2."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return 1
    if n > 16:
        raise ValueError("enumeration budget is n <= 16")
    cdef int side = 2 * n + 1
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] grid = np.zeros(side * side, dtype=np.uint8)
    cdef unsigned char * g = <unsigned char *> grid.data
    g[n * side + n] = 1
    cdef int64_t total = _saw_dfs(g, side, n, n, n)
    return total


cdef int64_t _saw_dfs(unsigned char * g, int side, int x, int y, int depth):
    cdef int64_t total = 0
    cdef int dx, dy, nx, ny, idx
    if depth == 0:
        return 1
    for dx in range(-1, 2):
        for dy in range(-1, 2):
            if dx == 0 and dy == 0:
                continue
            nx = x + dx
            ny = y + dy
            idx = nx * side + ny
            if not g[idx]:
                g[idx] = 1
                total += _saw_dfs(g, side, nx, ny, depth - 1)
                g[idx] = 0
    return total


cdef inline int64_t popbin(bitgen_t * bg, int64_t n) nogil:
    """Binomial(n, 1/2) as a popcount of n random bits."""
    cdef int64_t words = n >> 6
    cdef int64_t rem = n & 63
    cdef int64_t s = 0
    cdef int64_t i
    for i in range(words):
        s += cw_popcount(bg.next_uint64(bg.state))
    if rem:
        s += cw_popcount(bg.next_uint64(bg.state) &
                         ((<uint64_t> 1 << rem) - 1))
    return s


def q_return_walks(int nu, int64_t horizon, int64_t replicas, object seed,
                   int theta=6, object batch=None):
    """Return times of walks on Z^nu, censored at the horizon (see the
    pure-Python twin for the method; this one draws the multinomial jump
    counts with numpy's C binomial sampler)."""
    if nu > MAXDIM:
        raise ValueError("nu too large for compiled kernel")
    bg_py = np.random.PCG64(seed)
    capsule = bg_py.capsule
    cdef bitgen_t * bg = <bitgen_t *> PyCapsule_GetPointer(capsule, "BitGenerator")
    cdef binomial_t cache
    cache.has_binomial = 0
    cdef cnp.ndarray[cnp.int64_t, ndim=1] rt = np.full(replicas, -1, dtype=np.int64)
    cdef int64_t pos[MAXDIM]
    cdef int64_t rep, t, l1, rem, kk, remk, na, r, a
    cdef int ax
    cdef double p
    with nogil:
        for rep in range(replicas):
            for ax in range(nu):
                pos[ax] = 0
            r = <int64_t> (bg.next_uint64(bg.state) % <uint64_t> (2 * nu))
            pos[r >> 1] = 1 - ((r & 1) << 1)
            t = 1
            while True:
                l1 = 0
                for ax in range(nu):
                    l1 += pos[ax] if pos[ax] >= 0 else -pos[ax]
                rem = horizon - t
                if l1 > rem:
                    break
                if l1 <= theta:
                    r = <int64_t> (bg.next_uint64(bg.state) % <uint64_t> (2 * nu))
                    pos[r >> 1] += 1 - ((r & 1) << 1)
                    t += 1
                    l1 = 0
                    for ax in range(nu):
                        l1 += pos[ax] if pos[ax] >= 0 else -pos[ax]
                    if l1 == 0:
                        rt[rep] = t
                        break
                else:
                    kk = l1 - 1 if l1 - 1 < rem else rem
                    remk = kk
                    for ax in range(nu - 1):
                        if nu - ax == 2:
                            na = popbin(bg, remk)
                        else:
                            p = 1.0 / (nu - ax)
                            na = random_binomial(bg, p, remk, &cache)
                        remk -= na
                        pos[ax] += 2 * popbin(bg, na) - na
                    pos[nu - 1] += 2 * popbin(bg, remk) - remk
                    t += kk
    return rt
