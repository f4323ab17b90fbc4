"""Threshold constants of the high-dimensional regime.

The giant-component machinery works when the combinatorial growth of
blocking contours (7 continuations per step of a king-move self-avoiding
path) loses to the chance that an excursion keeps missing a given site.
That balance is the ratio

    rho(d) = 7 * (2/(d+1) + (1 - 2/(d+1)) * q(d-1)),

where q is the return probability; the condition rho < 1 picks the scale
c0 = 8d / log(1/rho) of the segments that certify the giant component and
the tilt e^{lambda0} = 7 / sqrt(rho) used in the union bound.  All logs are
natural.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from . import backend
from .returnprob import QEstimate, q_quadrature

SAW_BUDGET = 10  # exhaustive king-move enumeration stays exact and fast here


def chi(lam: float, m: int, d: int, q_value: float) -> float:
    """Per-excursion tilt factor e^lam * (m/(d+1) + (1 - m/(d+1)) * q)."""
    if lam < 0:
        raise ValueError("lam must be >= 0")
    if not 1 <= m <= d - 2:
        raise ValueError("need 1 <= m <= d-2")
    if not 0.0 <= q_value <= 1.0:
        raise ValueError("q_value must be a probability")
    frac = m / (d + 1)
    return math.exp(lam) * (frac + (1.0 - frac) * q_value)


@dataclass(frozen=True)
class ThresholdReport:
    d: int
    q_value: float
    q_abs_error: float
    rho: float
    rho_err: float
    holds: bool
    lambda0: float | None
    c0: float | None


def rho(d: int, tol: float = 1e-6, q_estimate: QEstimate | None = None) -> ThresholdReport:
    """Threshold report at dimension d (the condition needs d >= 4 to be
    satisfiable at all, since 7 * 2/(d+1) < 1 forces d >= 14)."""
    if d < 4:
        raise ValueError("the threshold condition needs d >= 4")
    q = q_estimate if q_estimate is not None else q_quadrature(d - 1, tol)
    frac = 2.0 / (d + 1)
    r = 7.0 * (frac + (1.0 - frac) * q.value)
    r_err = 7.0 * (1.0 - frac) * q.abs_error
    holds = r < 1.0
    lam0 = math.log(7.0) - 0.5 * math.log(r) if holds else None
    c0 = 8.0 * d / math.log(1.0 / r) if holds else None
    return ThresholdReport(d, q.value, q.abs_error, r, r_err, holds, lam0, c0)


@lru_cache(maxsize=None)
def rho_cached(d: int, tol: float = 1e-6) -> ThresholdReport:
    return rho(d, tol)


def threshold_scan(d_lo: int = 4, d_hi: int = 30, tol: float = 1e-6):
    """Reports for every d in [d_lo, d_hi] plus the minimal d where the
    condition holds (None if it never does in range)."""
    if not 4 <= d_lo <= d_hi <= 64:
        raise ValueError("scan range must sit inside [4, 64]")
    reports = [rho(d, tol) for d in range(d_lo, d_hi + 1)]
    minimal = next((r.d for r in reports if r.holds), None)
    return reports, minimal


def count_star_saws(n: int) -> int:
    """Exact number of n-step self-avoiding king-move paths on Z^2 starting
    at the origin (exhaustive depth-first enumeration)."""
    if not 1 <= n <= SAW_BUDGET:
        raise ValueError(f"enumeration budget is 1 <= n <= {SAW_BUDGET}")
    return backend.count_star_saws(n)


def star_saw_bound(n: int) -> int:
    """The contour-counting bound 8 * 7^(n-1)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 8 * 7 ** (n - 1)


def u0_placeholder(d: int, u: float) -> dict:
    """Echo the configured excursion-rate parameter with provenance.

    The theory only guarantees that a small enough value exists; nothing is
    computed here.  Refused when the threshold condition fails, since the
    constants it would be calibrated against do not exist there.
    """
    rep = rho_cached(d)
    if not rep.holds:
        raise ValueError(f"threshold condition fails at d={d}; "
                         "no excursion-rate constant exists")
    return {
        "d": d,
        "u": float(u),
        "source": "configured experiment parameter",
        "lambda0": rep.lambda0,
        "c0": rep.c0,
        "rho": rep.rho,
    }


def write_thresholds_csv(reports, fp) -> None:
    """CSV with columns d, q(d-1), rho, rho_err, holds, lambda0, c0."""
    fp.write("d,q,rho,rho_err,holds,lambda0,c0\n")
    for r in reports:
        lam = f"{r.lambda0:.10g}" if r.lambda0 is not None else ""
        c0 = f"{r.c0:.10g}" if r.c0 is not None else ""
        fp.write(f"{r.d},{r.q_value:.10g},{r.rho:.10g},{r.rho_err:.3g},"
                 f"{int(r.holds)},{lam},{c0}\n")
