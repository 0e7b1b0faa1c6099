import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from icbargain import (
    RatePair,
    StandardChannel,
    check_even_split,
    competitive_rates,
    fdm_feasible,
    fdm_rates,
    invert_share,
    nash_product,
    region_boundary,
    region_membership,
    solve_nbs,
    threshold_share,
)
from icbargain.bargaining import even_split_thresholds, share_gap

# 50-digit mpmath evaluations, frozen
F1_1 = 0.25386016865908887
F_40DB = 0.07520122096998312
REF_RHO_STAR = 0.6742488543135293
REF_NBS = (4.869558611014468, 2.155115957096484)
REF_F_AT_07 = 2.9179781471043097


def _oracle_share(x, y):
    return brentq(lambda r: r * math.log1p(x / r) - math.log1p(x / (1 + y)), 1e-300, 1.0,
                  xtol=1e-15, rtol=4 * np.finfo(float).eps)


def test_fdm_rates_endpoints(ref_channel):
    r = fdm_rates(ref_channel, 1.0)
    assert (r.r1, r.r2) == (pytest.approx(math.log2(101)), 0.0)
    r = fdm_rates(ref_channel, 0.0)
    assert (r.r1, r.r2) == (0.0, pytest.approx(math.log2(1 + ref_channel.snr2)))
    assert fdm_rates(ref_channel, 0.7).r1 == pytest.approx(5.017945132164426, abs=1e-12)
    with pytest.raises(ValueError):
        fdm_rates(ref_channel, 1.1)


def test_threshold_share_values():
    assert threshold_share(5.0, 0.0) == 1.0
    assert threshold_share(1.0, 1.0) == pytest.approx(F1_1, abs=1e-13)
    assert threshold_share(1e4, 7e3) == pytest.approx(F_40DB, abs=1e-13)
    assert abs(share_gap(1.0, 1.0, threshold_share(1.0, 1.0))) < 1e-10
    for bad in ((0.0, 1.0), (-1.0, 1.0), (1.0, -0.5)):
        with pytest.raises(ValueError):
            threshold_share(*bad)


@settings(max_examples=300)
@given(st.floats(-2, 6), st.floats(-2, 6))
def test_threshold_share_matches_brentq(lx, ly):
    x, y = 10.0 ** lx, 10.0 ** ly
    assert threshold_share(x, y) == pytest.approx(_oracle_share(x, y), rel=1e-10, abs=1e-13)


@given(st.floats(-2, 6), st.floats(-2, 6), st.floats(0.0, 3.0))
def test_threshold_share_monotone_in_interference(lx, ly, dly):
    x = 10.0 ** lx
    assert threshold_share(x, 10.0 ** ly) >= threshold_share(x, 10.0 ** (ly + dly))


def test_feasibility():
    rep = fdm_feasible(StandardChannel(10, 10, 0, 0))
    assert rep.rho1_min == rep.rho2_min == 1.0
    assert not rep.feasible
    rep = fdm_feasible(StandardChannel.from_db(40, 40, 0.7, 0.7))
    assert rep.feasible
    assert rep.slack == pytest.approx(0.8495975580600338, abs=1e-12)


def test_ref_channel_feasible(ref_channel):
    rep = fdm_feasible(ref_channel)
    assert rep.feasible
    assert rep.rho1_min == pytest.approx(0.3800771785996992, abs=1e-13)


def test_nash_product(ref_channel):
    rep = fdm_feasible(ref_channel)
    assert nash_product(ref_channel, rep.rho1_min) == pytest.approx(0.0, abs=1e-12)
    assert nash_product(ref_channel, 1 - rep.rho2_min) == pytest.approx(0.0, abs=1e-12)
    assert nash_product(ref_channel, 0.7) == pytest.approx(REF_F_AT_07, abs=1e-12)
    assert nash_product(ref_channel, 0.1) < 0


def test_solve_ref_channel(ref_channel):
    out = solve_nbs(ref_channel)
    assert out.agreement and out.kind == "agreement"
    assert out.rho_star == pytest.approx(REF_RHO_STAR, abs=1e-12)
    assert (out.nbs_rates.r1, out.nbs_rates.r2) == pytest.approx(REF_NBS, abs=1e-11)
    g1, g2 = out.gains
    assert g1 == pytest.approx(1.6, rel=0.1)
    assert g2 == pytest.approx(4.0, rel=0.1)


def test_solve_disagreement():
    sc = StandardChannel.from_db(10, 10, 0, 0)
    out = solve_nbs(sc)
    assert not out.agreement and out.rho_star is None
    assert out.nbs_rates == out.competitive_rates == competitive_rates(sc)
    assert out.gains == (1.0, 1.0)
    with pytest.raises(ValueError):
        solve_nbs(sc, tol=0)


def _grid_argmax(sc, n=1_000_001):
    rho = np.linspace(0.0, 1.0, n)[1:-1]
    h = sc.w / 2
    rc1 = h * np.log2(1 + sc.snr1 / (1 + sc.alpha * sc.snr2))
    rc2 = h * np.log2(1 + sc.snr2 / (1 + sc.beta * sc.snr1))
    F = (rho * h * np.log2(1 + sc.snr1 / rho) - rc1) * ((1 - rho) * h * np.log2(1 + sc.snr2 / (1 - rho)) - rc2)
    return rho[np.argmax(F)]


@pytest.mark.parametrize("point", [(20, 15, 0.4, 0.7), (30, 5, 0.9, 0.2), (3, 38, 0.5, 0.95)])
def test_solve_matches_grid(point):
    sc = StandardChannel.from_db(*point)
    out = solve_nbs(sc)
    assert out.agreement
    assert out.rho_star == pytest.approx(_grid_argmax(sc), abs=1e-4)


@given(st.floats(0, 40), st.floats(0.01, 1.0))
def test_symmetric_channel_splits_evenly(snr_db, a):
    out = solve_nbs(StandardChannel.from_db(snr_db, snr_db, a, a))
    assume(out.agreement)
    assert out.rho_star == pytest.approx(0.5, abs=1e-8)
    assert out.nbs_rates.r1 == pytest.approx(out.nbs_rates.r2, rel=1e-12)


feasible_channels = st.builds(StandardChannel.from_db, st.floats(0, 40), st.floats(0, 40),
                              st.floats(0.05, 1.0), st.floats(0.05, 1.0))


@settings(max_examples=60, deadline=None)
@given(feasible_channels)
def test_agreement_properties(sc):
    out = solve_nbs(sc)
    assume(out.agreement)
    rc = out.competitive_rates
    assert out.nbs_rates.r1 > rc.r1 and out.nbs_rates.r2 > rc.r2
    assert out.nash_product > 0
    # user 2 holds exactly what user 1 does not: point sits on the boundary
    assert out.nbs_rates == fdm_rates(sc, out.rho_star)
    assert region_membership(out.nbs_rates, sc) == {"in_fdm": True, "in_game_region": True}
    bumped = RatePair(out.nbs_rates.r1 * 1.01, out.nbs_rates.r2 * 1.01)
    assert not region_membership(bumped, sc)["in_fdm"]


@settings(max_examples=40, deadline=None)
@given(feasible_channels, st.floats(0.1, 10.0))
def test_bandwidth_scale_invariance(sc, c):
    a = solve_nbs(sc)
    assume(a.agreement)
    b = solve_nbs(replace(sc, w=c * sc.w))
    assert b.rho_star == pytest.approx(a.rho_star, abs=1e-8)
    assert b.nbs_rates.r1 == pytest.approx(c * a.nbs_rates.r1, rel=1e-8)
    assert b.nash_product == pytest.approx(c * c * a.nash_product, rel=1e-8)


def test_swapping_users_mirrors_split(ref_channel):
    a = solve_nbs(ref_channel)
    b = solve_nbs(ref_channel.swapped())
    assert b.rho_star == pytest.approx(1 - a.rho_star, abs=1e-10)


def test_nash_product_unimodal_on_feasible_interval():
    for point in [(20, 15, 0.4, 0.7), (40, 40, 0.7, 0.7), (10, 30, 0.3, 0.9)]:
        sc = StandardChannel.from_db(*point)
        rep = fdm_feasible(sc)
        rho = np.linspace(rep.rho1_min, 1 - rep.rho2_min, 5001)
        F = np.array([nash_product(sc, r) for r in rho])
        peak = int(np.argmax(F))
        assert np.all(np.diff(F[:peak + 1]) >= -1e-12)
        assert np.all(np.diff(F[peak:]) <= 1e-12)


def test_rate_concave_in_share(ref_channel):
    rho = np.linspace(0.0, 1.0, 10_001)
    r1 = np.array([fdm_rates(ref_channel, x).r1 for x in rho])
    assert np.all(np.diff(r1, 2) <= 1e-12)


def test_even_split():
    t1, t2 = even_split_thresholds(0.7, 0.7)
    assert t1 == pytest.approx(0.5 * 0.7 ** -2) and t2 == pytest.approx(1.0204081632653061)
    assert check_even_split(StandardChannel(100, 100, 0.7, 0.7))
    assert not check_even_split(StandardChannel(0.5, 0.5, 0.7, 0.7))
    with pytest.raises(ValueError):
        check_even_split(StandardChannel(1, 1, 0.0, 0.7))


@settings(max_examples=200)
@given(st.floats(1e-3, 1.0), st.floats(1e-3, 1.0), st.floats(1.0, 100.0), st.floats(1.0, 100.0))
def test_even_split_above_threshold_is_feasible(a, b, k1, k2):
    t1, t2 = even_split_thresholds(a, b)
    assert fdm_feasible(StandardChannel(k1 * t1, k2 * t2, a, b)).feasible


def test_region_boundary(ref_channel):
    pts = region_boundary(ref_channel, 3)
    assert pts[0][0] == 0.0 and pts[-1][0] == 1.0
    assert pts[0][1] == fdm_rates(ref_channel, 0.0)
    assert pts[1][1] == fdm_rates(ref_channel, 0.5)
    assert pts[2][1] == fdm_rates(ref_channel, 1.0)
    pts = region_boundary(ref_channel, 512)
    r1 = [p.r1 for _, p in pts]
    r2 = [p.r2 for _, p in pts]
    assert all(np.diff(r1) >= 0) and all(np.diff(r2) <= 0)
    # boundary passes above the competitive point
    rc = competitive_rates(ref_channel)
    assert any(p.r1 >= rc.r1 and p.r2 > rc.r2 for _, p in pts)
    with pytest.raises(ValueError):
        region_boundary(ref_channel, 1)


def test_invert_share(ref_channel):
    full = fdm_rates(ref_channel, 1.0).r1
    assert invert_share(100, 2, 0.0) == 0.0
    assert invert_share(100, 2, full) == 1.0
    rc = competitive_rates(ref_channel)
    assert invert_share(ref_channel.snr1, 2, rc.r1) == pytest.approx(fdm_feasible(ref_channel).rho1_min, abs=1e-11)
    with pytest.raises(ValueError):
        invert_share(100, 2, full * 1.001)


def test_region_membership(ref_channel):
    assert region_membership(RatePair(0, 0), ref_channel) == {"in_fdm": True, "in_game_region": False}
    rc = competitive_rates(ref_channel)
    assert region_membership(rc, ref_channel) == {"in_fdm": True, "in_game_region": True}
    nbs = solve_nbs(ref_channel).nbs_rates
    assert region_membership(nbs, ref_channel)["in_game_region"]
    assert not region_membership(RatePair(nbs.r1 * 1.01, nbs.r2 * 1.01), ref_channel)["in_fdm"]
    assert not region_membership(RatePair(100.0, 0.0), ref_channel)["in_fdm"]


def test_share_asymptotics():
    # joint growth (interference scales with the SNR): the needed share vanishes
    joint = [threshold_share(10.0 ** e, 0.7 * 10.0 ** e) for e in range(1, 9)]
    assert all(b < a for a, b in zip(joint, joint[1:]))
    assert joint[-1] < 0.05
    # fixed interference term: the competitive rate tends to the full-band rate
    fixed = [threshold_share(10.0 ** e, 5.0) for e in range(1, 9)]
    assert all(b > a for a, b in zip(fixed, fixed[1:]))
    assert fixed[-1] > 0.85
