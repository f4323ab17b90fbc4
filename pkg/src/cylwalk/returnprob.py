r"""Return probability of simple random walk on Z^nu, and the strip-hitting
quantity that bounds excursion visit rates on the cylinder.

The quadrature route uses the lattice Green function at the origin,

    G(nu) = \int_0^\infty e^{-t} I_0(t/nu)^nu dt,      q(nu) = 1 - 1/G(nu),

evaluated with the exponentially scaled Bessel function (the e^{-t} factor
cancels exactly: the integrand is i0e(t/nu)^nu, bounded and monotone).  The
integrand decays like (nu/(2 pi t))^{nu/2}, so the tail is mapped onto a
finite interval with t = 1/u^2 and integrated as well; nothing is truncated.

The Monte Carlo route simulates walks directly (leapfrog jumps, exact in
law) and is kept fully independent of the quadrature so the two can vouch
for each other.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from scipy.integrate import quad
from scipy.special import i0e

from . import backend
from .rng import stream_base

# provable pointwise bound: I0(x) <= e^x * sqrt(pi/(8x)) for x > 0 (from
# cos(theta) <= 1 - 2 theta^2/pi^2 on [0, pi]); used only to certify where
# the finite piece of the integral may be cut.
_TAIL_C = math.pi / 8.0


def green_tail_bound(T: float, nu: int) -> float:
    """Upper bound on the Green-function integral beyond T."""
    if nu < 3:
        raise ValueError("transient regime only (nu >= 3)")
    c = (_TAIL_C * nu) ** (nu / 2.0)
    return c * T ** (1.0 - nu / 2.0) / (nu / 2.0 - 1.0)


@dataclass(frozen=True)
class QEstimate:
    """A return-probability value with an error bound.

    abs_error covers the numerical/statistical error of the method itself;
    Monte Carlo estimates additionally carry the documented downward
    truncation bias bound (walks that return only after the horizon).
    """

    nu: int
    value: float
    abs_error: float
    method: str
    bias_bound: float = 0.0
    detail: dict = field(default_factory=dict, compare=False)

    def consistent_with(self, other: "QEstimate") -> bool:
        tol = self.abs_error + self.bias_bound + other.abs_error + other.bias_bound
        return abs(self.value - other.value) <= tol


def green_function(nu: int, tol: float = 1e-8, T: float | None = None):
    """Green function of simple random walk on Z^nu at the origin, with an
    absolute error estimate."""
    if nu < 3:
        raise ValueError("Green function diverges for nu <= 2 (recurrence)")
    if T is None:
        T = max(60.0, 12.0 * nu)

    def f(t):
        return i0e(t / nu) ** nu

    head, e1 = quad(f, 0.0, T, epsabs=tol / 4, epsrel=1e-12, limit=400)

    # tail via t = 1/u^2: integrand 2 u^-3 f(1/u^2), smooth on (0, T^-1/2]
    # and O(u^(nu-3)) at 0
    def g(u):
        if u <= 0.0:
            return 2.0 * (nu / (2 * math.pi)) ** 1.5 if nu == 3 else 0.0
        return 2.0 * u ** -3 * i0e(1.0 / (u * u * nu)) ** nu

    tail, e2 = quad(g, 0.0, T ** -0.5, epsabs=tol / 4, epsrel=1e-12, limit=400)
    return head + tail, e1 + e2


def q_quadrature(nu: int, tol: float = 1e-6) -> QEstimate:
    """Return probability via the Green-function integral, abs_error <= tol
    (recurrent dimensions return exactly 1)."""
    if nu < 1:
        raise ValueError("nu must be >= 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if nu <= 2:
        return QEstimate(nu, 1.0, 0.0, "quadrature")
    G, eG = green_function(nu, tol=tol)
    # q = 1 - 1/G and G >= 1, so an error on G shrinks on q
    q = 1.0 - 1.0 / G
    err = eG / (G * G) + 1e-14
    return QEstimate(nu, q, err, "quadrature", detail={"green": G})


def q_monte_carlo(nu: int, horizon: int, replicas: int, seed: int,
                  bias_const: float = 1.0) -> QEstimate:
    """Fraction of seeded walks returning to the origin within the horizon.

    abs_error is a 95% binomial half-width; bias_bound documents the
    downward truncation bias bias_const * horizon^(1 - nu/2) from returns
    later than the horizon.
    """
    if nu < 3:
        raise ValueError("Monte Carlo estimator is for the transient regime")
    rt = backend.q_return_walks(nu, horizon, replicas, seed)
    hits = int((rt > 0).sum())
    p = hits / replicas
    se = math.sqrt(max(p * (1.0 - p), 1e-12) / replicas)
    bias = bias_const * horizon ** (1.0 - nu / 2.0)
    return QEstimate(nu, p, 1.96 * se, "monte_carlo", bias_bound=bias,
                     detail={"horizon": horizon, "replicas": replicas,
                             "hits": hits, "return_times": rt})


# -- the strip quantity --------------------------------------------------------

@dataclass(frozen=True)
class QNEstimate:
    """Monte Carlo maximum over scanned (plane orientation, start) pairs of
    the probability of hitting the plane before leaving the level-0 outer
    block."""

    d: int
    m: int
    N: int
    value: float
    se: float
    replicas_per_cell: int
    cells: list

    def upper(self, z: float = 2.0) -> float:
        return self.value + z * self.se


def q_N_estimate(d: int, m: int, N: int, replicas: int, seed: int,
                 start_heights=None, max_steps: int | None = None) -> QNEstimate:
    """Estimate sup over axis planes F and boundary starts of
    P[hit F before the height leaves the level-0 outer block].

    Torus directions are exchangeable, so orientations reduce to two
    classes (plane sweeping the vertical axis or not); the vertical
    positions of starts are scanned rather than reduced (start_heights,
    default (0, N)).  replicas is the per-cell count.
    """
    if d < 3 or not 1 <= m <= d - 2:
        raise ValueError("need d >= 3 and 1 <= m <= d-2")
    z_lo, z_hi = -2 * N + 1, 2 * N - 1
    if max_steps is None:
        max_steps = 400 * N * N * (d + 1)
    heights = list(start_heights) if start_heights is not None else [0, N]

    cells = []
    # class 1: plane sweeps the vertical axis and m-1 torus axes
    axes_v = frozenset([d] + list(range(m - 1)))
    fixed_v = [(a, 0) for a in range(d + 1) if a not in axes_v]
    for h in heights:
        start = ([0] * d, h)
        start[0][m - 1] = 1  # off-plane torus direction
        cells.append(("sweep_z", fixed_v, start[0], start[1]))
    # class 2: plane spans m torus axes at height 0
    axes_t = frozenset(range(m))
    fixed_t = [(a, 0) for a in range(d + 1) if a not in axes_t]
    torus_start = [0] * d
    torus_start[m] = 1
    cells.append(("fixed_z_torus_start", fixed_t, torus_start, 0))
    cells.append(("fixed_z_height_start", fixed_t, [0] * d, 1))

    results = []
    stream_idx = itertools.count()
    for name, fixed, torus0, h0 in cells:
        hits = 0
        capped = 0
        for _ in range(replicas):
            base = stream_base(seed, next(stream_idx))
            outcome, _steps, _k = backend.walk_until_plane_or_exit(
                d, N, base, 0, list(torus0), h0, fixed, z_lo, z_hi, max_steps)
            if outcome == 0:
                hits += 1
            elif outcome == 2:
                capped += 1
        p = hits / replicas
        se = math.sqrt(max(p * (1 - p), 1e-12) / replicas)
        results.append({"cell": name, "p": p, "se": se, "capped": capped})
    best = max(results, key=lambda r: r["p"])
    return QNEstimate(d, m, N, best["p"], best["se"], replicas, results)


# -- table output ----------------------------------------------------------------

def write_qtable(estimates, fp) -> None:
    """CSV with columns nu, q, abs_error, method."""
    fp.write("nu,q,abs_error,method\n")
    for est in estimates:
        fp.write(f"{est.nu},{est.value:.10g},{est.abs_error:.6g},{est.method}\n")
