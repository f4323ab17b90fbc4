import math

import pytest

from cylwalk.crit import (chi, count_star_saws, rho, star_saw_bound,
                          threshold_scan, u0_placeholder, write_thresholds_csv)
from cylwalk.returnprob import q_quadrature

# golden threshold ratios, frozen from the quadrature at tol 1e-8
RHO_17 = 0.985963
RHO_16 = 1.045077


def test_chi_identity_at_lambda_zero():
    assert chi(0.0, 2, 17, 1.0) == 1.0


def test_chi_transient_value_below_one():
    q16 = q_quadrature(16, 1e-8).value
    val = chi(0.0, 2, 17, q16)
    assert val == 2 / 18 + (16 / 18) * q16
    assert val < 1


def test_chi_monotone_in_lambda():
    vals = [chi(lam, 2, 17, 0.03) for lam in (0.0, 0.5, 1.0, 2.0)]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_chi_domain_validation():
    with pytest.raises(ValueError):
        chi(-0.1, 2, 17, 0.5)
    with pytest.raises(ValueError):
        chi(0.0, 16, 17, 0.5)
    with pytest.raises(ValueError):
        chi(0.0, 2, 17, 1.5)


def test_threshold_holds_exactly_from_17():
    r17 = rho(17, tol=1e-8)
    r16 = rho(16, tol=1e-8)
    assert r17.holds and not r16.holds
    assert abs(r17.rho - RHO_17) < 1e-6
    assert abs(r16.rho - RHO_16) < 1e-6
    assert r16.lambda0 is None and r16.c0 is None


def test_threshold_report_recomputes_exactly():
    rep = rho(20, tol=1e-8)
    frac = 2.0 / 21
    assert rep.rho == 7.0 * (frac + (1 - frac) * rep.q_value)
    assert rep.lambda0 == math.log(7.0) - 0.5 * math.log(rep.rho)
    assert rep.c0 == 8.0 * 20 / math.log(1.0 / rep.rho)
    assert rep.rho_err <= 7.0 * rep.q_abs_error


def test_tilt_identity():
    rep = rho(17, tol=1e-10)
    val = chi(rep.lambda0, 2, 17, rep.q_value)
    assert abs(val - math.sqrt(rep.rho)) < 1e-12
    assert val < 1


def test_rho_rejects_low_dimension():
    with pytest.raises(ValueError):
        rho(3)


def test_scan_minimal_dimension_and_monotonicity():
    reports, minimal = threshold_scan(4, 30)
    assert minimal == 17
    rhos = [r.rho for r in reports]
    assert all(a > b for a, b in zip(rhos, rhos[1:]))
    flags = [r.holds for r in reports]
    assert flags == sorted(flags)  # False... then True...
    for r in reports:
        assert r.rho_err <= 7 * r.q_abs_error + 1e-18


def test_scan_range_validation():
    with pytest.raises(ValueError):
        threshold_scan(3, 10)
    with pytest.raises(ValueError):
        threshold_scan(4, 100)


def test_star_saw_exact_counts():
    assert count_star_saws(1) == 8
    assert count_star_saws(2) == 56
    # 368 checked by hand: 4 axis-type two-step prefixes contribute 45 each,
    # 4 diagonal ones 47 each
    assert count_star_saws(3) == 368
    assert count_star_saws(4) == 2336


def test_star_saw_bounds():
    prev = None
    for n in range(1, 9):
        a = count_star_saws(n)
        assert a <= star_saw_bound(n)
        if prev is not None:
            assert a <= 7 * prev
        prev = a


def test_star_saw_budget():
    with pytest.raises(ValueError):
        count_star_saws(11)
    with pytest.raises(ValueError):
        count_star_saws(0)


def test_u0_passthrough_with_provenance():
    rec = u0_placeholder(17, 0.01)
    assert rec["u"] == 0.01
    assert rec["lambda0"] == rho(17).lambda0
    assert rec["c0"] == rho(17).c0
    with pytest.raises(ValueError):
        u0_placeholder(16, 0.01)


def test_thresholds_csv_format():
    import io
    reports, _ = threshold_scan(15, 18)
    buf = io.StringIO()
    write_thresholds_csv(reports, buf)
    lines = buf.getvalue().strip().split("\n")
    assert lines[0] == "d,q,rho,rho_err,holds,lambda0,c0"
    assert len(lines) == 5
    row16 = lines[2].split(",")
    assert row16[0] == "16" and row16[4] == "0" and row16[5] == ""
    row17 = lines[3].split(",")
    assert row17[4] == "1" and row17[5] != ""
