import math

import numpy as np
import pytest
from scipy.special import i0e

from cylwalk.returnprob import (QEstimate, green_function, green_tail_bound,
                                q_monte_carlo, q_N_estimate, q_quadrature,
                                write_qtable)

# independent references: the classical return probability on Z^3 and the
# Green function value it comes from
Q3_REFERENCE = 0.340537329550999
G3_REFERENCE = 1.516386059151978


def test_recurrent_dimensions_exact():
    for nu in (1, 2):
        est = q_quadrature(nu)
        assert est.value == 1.0 and est.abs_error == 0.0


def test_q3_matches_reference():
    est = q_quadrature(3, 1e-8)
    assert abs(est.value - Q3_REFERENCE) < 1e-8
    assert est.abs_error <= 1e-8
    assert abs(est.detail["green"] - G3_REFERENCE) < 1e-8


def test_q_strictly_decreasing():
    vals = [q_quadrature(nu, 1e-8).value for nu in range(3, 21)]
    for a, b in zip(vals, vals[1:]):
        assert b < a


def test_large_nu_asymptotics():
    est = q_quadrature(30, 1e-6)
    assert abs(2 * 30 * est.value - 1.0) <= 0.1


def test_tol_validation():
    with pytest.raises(ValueError):
        q_quadrature(3, -1.0)
    with pytest.raises(ValueError):
        q_quadrature(0)


def test_truncation_soundness():
    # halving the split point moves the result by less than the error bound
    for nu in (3, 5, 16):
        g1, e1 = green_function(nu, tol=1e-9, T=80.0)
        g2, e2 = green_function(nu, tol=1e-9, T=40.0)
        assert abs(g1 - g2) <= e1 + e2 + 1e-12
    # and the certified analytic tail bound really dominates the tail
    for nu in (3, 4, 8):
        for T in (50.0, 100.0):
            g_full, _ = green_function(nu, tol=1e-10)
            g_head, _ = green_function(nu, tol=1e-10, T=T)
            # both include their tails; compare the bound against a numeric
            # tail instead
            from scipy.integrate import quad
            tail, _ = quad(lambda t: i0e(t / nu) ** nu, T, T * 400, limit=400)
            assert tail <= green_tail_bound(T, nu)


def test_bessel_bound_pointwise():
    # I0(x) <= e^x sqrt(pi/(8x)) equivalently i0e(x) <= sqrt(pi/(8x))
    x = np.linspace(0.05, 400, 4000)
    assert (i0e(x) <= np.sqrt(np.pi / (8 * x)) + 1e-15).all()


def test_i0e_against_series_and_asymptotics():
    # series cross-check at small arguments (relative error budget 1e-12)
    for x in (0.1, 0.5, 1.0, 3.0, 8.0):
        s = sum((x / 2) ** (2 * k) / math.factorial(k) ** 2 for k in range(60))
        assert abs(i0e(x) - s * math.exp(-x)) <= 1e-12 * i0e(x)
    # leading asymptotics at large argument
    for x in (300.0, 1000.0):
        lead = 1.0 / math.sqrt(2 * math.pi * x) * (1 + 1 / (8 * x))
        assert abs(i0e(x) - lead) <= 1e-5 * lead


def test_monte_carlo_agrees_with_quadrature():
    for nu in (3, 4, 5):
        mc = q_monte_carlo(nu, 10 ** 4, 10 ** 5, seed=5)
        quad_est = q_quadrature(nu, 1e-8)
        assert mc.consistent_with(quad_est), (nu, mc.value, quad_est.value)


def test_monte_carlo_determinism_and_monotonicity():
    a = q_monte_carlo(3, 10 ** 4, 10 ** 4, seed=71)
    b = q_monte_carlo(3, 10 ** 4, 10 ** 4, seed=71)
    assert a.value == b.value
    rt = a.detail["return_times"]
    # the return-time array makes the horizon monotonicity exact
    est_half = (np.asarray(rt) > 0) & (np.asarray(rt) <= 5000)
    assert est_half.mean() <= a.value


def test_monte_carlo_rejects_recurrent():
    with pytest.raises(ValueError):
        q_monte_carlo(2, 100, 100, seed=1)


def test_qtable_output():
    import io
    ests = [q_quadrature(3, 1e-6), QEstimate(4, 0.19, 1e-4, "monte_carlo")]
    buf = io.StringIO()
    write_qtable(ests, buf)
    lines = buf.getvalue().strip().split("\n")
    assert lines[0] == "nu,q,abs_error,method"
    assert len(lines) == 3
    assert lines[1].startswith("3,0.3405373")


def test_strip_quantity_basics():
    est = q_N_estimate(4, 2, 8, replicas=300, seed=3)
    assert 0.0 <= est.value <= 1.0
    again = q_N_estimate(4, 2, 8, replicas=300, seed=3)
    assert est.value == again.value
    with pytest.raises(ValueError):
        q_N_estimate(4, 3, 8, replicas=10, seed=1)  # m must be <= d-2
    with pytest.raises(ValueError):
        q_N_estimate(2, 1, 8, replicas=10, seed=1)


def test_strip_quantity_trend():
    # the estimates shrink with N toward the open-space return probability
    vals = [q_N_estimate(4, 2, N, replicas=800, seed=21).value
            for N in (8, 16)]
    assert vals[1] < vals[0]
