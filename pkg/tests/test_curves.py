import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cantorcomb.cantor import cantor_distance
from cantorcomb.curves import (Polyline, axis_integral, connect, estimate_C, gap_closed_form,
                               interval_series_closed_form, pair_ratio, partial_gap_sum,
                               polyline_integral, sample_pair, segment_profile_integral)
from cantorcomb.domain import CombDomain, Region, classify
from cantorcomb.errors import AdmissibilityError, PreconditionError

SQ2 = math.sqrt(2.0)


def profile(pts):
    """Synthetic distance sqrt(2) * t along a segment starting at the origin."""
    return SQ2 * np.hypot(pts[:, 0], pts[:, 1])


def test_segment_profile_examples():
    assert segment_profile_integral(1.0, 1.5) == pytest.approx(2 ** -0.25 / 0.5, rel=1e-12)
    assert segment_profile_integral(1.0, 1.5) == pytest.approx(1.681793, abs=1e-6)
    assert segment_profile_integral(0.0, 1.3) == 0.0
    assert segment_profile_integral(2.0, 1.2) == pytest.approx(2.030631, abs=1e-6)


def test_gap_closed_form_examples():
    g1 = gap_closed_form(1, 1.5, 1 / 3)
    assert g1 == pytest.approx(1.941935, abs=5e-5)
    # oracle: 2 * int_0^{1/6} (t/sqrt 2)^{-1/2} dt evaluated by hand
    assert g1 == pytest.approx(2 * 2 ** 0.25 * 2 * (1 / 6) ** 0.5, rel=1e-12)
    assert gap_closed_form(2, 1.5, 1 / 3) == pytest.approx(g1 * (1 / 3) ** 0.5, rel=1e-12)
    assert gap_closed_form(2, 1.5, 1 / 3) == pytest.approx(1.121172, abs=5e-5)
    assert gap_closed_form(3, 1.2, 0.5 - 1e-12) < 1e-8


def test_series_closed_form_examples():
    assert interval_series_closed_form(1, 1.2, 1 / 3) == pytest.approx(1.565, abs=1e-3)
    for j in range(1, 6):
        ratio = interval_series_closed_form(j + 1, 1.2, 1 / 3) / interval_series_closed_form(j, 1.2, 1 / 3)
        assert ratio == pytest.approx((1 / 3) ** 0.8, rel=1e-12)
    with pytest.raises(AdmissibilityError) as exc:
        interval_series_closed_form(1, 1.5, 1 / 3)
    assert "1.369" in str(exc.value)


@given(st.floats(0.1, 0.45), st.floats(1.05, 1.6), st.integers(1, 6), st.integers(5, 60))
def test_partial_sums_increase_to_series(lam, p, j, K):
    if 2 * lam ** (2 - p) > 0.9:
        return
    full = interval_series_closed_form(j, p, lam)
    part = partial_gap_sum(j, p, lam, K)
    assert part <= full * (1 + 1e-12)
    # geometric tail: (2 lam^(2-p))^K relative
    assert full - part <= full * (2 * lam ** (2 - p)) ** K * (1 + 1e-9) + 1e-15


def test_polyline_integral_outside_segment(comb13):
    r = polyline_integral(Polyline([(2, 0), (3, 0)]), 1.5, comb13, tol=1e-10)
    assert r.value == pytest.approx((2 ** 0.5 - 1) / 0.5, rel=1e-8)
    assert r.error <= 1e-10 * r.value


def test_polyline_integral_zero_length(comb13):
    assert polyline_integral(Polyline([(2, 0), (2, 0)]), 1.5, comb13).value == 0.0


def test_polyline_rejects_interior(comb13):
    with pytest.raises(PreconditionError):
        polyline_integral(Polyline([(-0.5, 0), (-0.4, 0)]), 1.5, comb13)


@pytest.mark.parametrize("p", [1.1, 1.5, 1.9])
@pytest.mark.parametrize("L", [0.01, 1.0, 2.0])
def test_profile_segment_matches_closed_form(comb13, p, L):
    gamma = Polyline([(0, 0), (L / SQ2, L / SQ2)])
    r = polyline_integral(gamma, p, comb13, tol=1e-10, distance=profile)
    assert r.value == pytest.approx(segment_profile_integral(L, p), rel=1e-8)


def test_gap_crossing_p15_sandwich(comb13):
    # only gap points are crossed, so the integral is finite even for this inadmissible p
    r = polyline_integral(Polyline([(1 / 3, 0), (2 / 3, 0)]), 1.5, comb13)
    g = gap_closed_form(1, 1.5, 1 / 3)
    assert g * 2 ** -0.25 - 1e-6 <= r.value <= g + 1e-6


def test_axis_integral_matches_series():
    r = axis_integral(0.0, 1 / 3, 1.2, 1 / 3)
    assert r.value == pytest.approx(interval_series_closed_form(1, 1.2, 1 / 3), rel=1e-12)
    with pytest.raises(AdmissibilityError):
        axis_integral(0.0, 0.5, 1.5, 1 / 3)


@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
def test_axis_integral_against_gap_quadrature():
    # independent route: quadrature over every gap of level <= 14 that meets
    # [u, v], with the distance taken to the gap ends; deeper gaps are a tail
    from scipy import integrate

    from cantorcomb.cantor import CantorParams, endpoint_set

    lam, p, depth = 1 / 3, 1.2, 14
    ends = np.sort(endpoint_set(CantorParams(lam, depth), depth))
    u, v = 0.1, 0.2
    brute = 0.0
    for a, b in zip(ends[1:-1:2], ends[2::2]):
        lo, hi = max(a, u), min(b, v)
        if hi <= lo:
            continue
        f = lambda x: (min(x - a, b - x) / SQ2) ** (1 - p)
        brute += integrate.quad(f, lo, hi, points=[0.5 * (a + b)] if lo < 0.5 * (a + b) < hi else None,
                                epsabs=1e-14, epsrel=1e-12, limit=200)[0]
    r = axis_integral(u, v, p, lam, rtol=1e-12)
    tail = 2 ** depth * interval_series_closed_form(depth, p, lam)
    assert brute <= r.value + 1e-9
    assert r.value - brute <= tail + 1e-9


def test_connect_case_ii(comb13):
    gamma, case = connect((0.4, 0.05), (0.6, -0.03), comb13)
    assert case == "ii"
    assert np.allclose(gamma.vertices, [(0.4, 0.05), (0.4, 0), (0.6, 0), (0.6, -0.03)])


def test_connect_case_i(comb13):
    gamma, case = connect((2, 2), (3, 1), comb13)
    assert case == "i"
    assert len(gamma.vertices) - 1 <= 4
    seg = np.diff(gamma.vertices, axis=0)
    assert np.allclose(np.abs(seg[:, 0]), np.abs(seg[:, 1]))


def test_connect_case_i_goes_around_square(comb13):
    gamma, _ = connect((2, 0), (-2, 0), comb13)
    assert np.all(np.max(np.abs(gamma.vertices), axis=1) >= 1 - 1e-12)
    seg = np.diff(gamma.vertices, axis=0)
    assert np.allclose(np.abs(seg[:, 0]), np.abs(seg[:, 1]))


def test_connect_case_iii(comb13):
    gamma, case = connect((0.5, 0.1), (2, 0), comb13)
    assert case == "iii"
    assert np.any(np.all(np.isclose(gamma.vertices, (1.0, 0.0)), axis=1))
    assert tuple(gamma.vertices[0]) == (0.5, 0.1) and tuple(gamma.vertices[-1]) == (2.0, 0.0)
    back, _ = connect((2, 0), (0.5, 0.1), comb13)
    assert np.allclose(back.vertices, gamma.vertices[::-1])


def test_connect_rejects_interior(comb13):
    with pytest.raises(PreconditionError):
        connect((-0.5, 0.0), (0.5, 0.0), comb13)


def _samples(gamma, k=200):
    out = []
    for a, b in gamma.segments:
        t = np.linspace(0, 1, k)[:, None]
        out.append(a + t * (b - a))
    return np.vstack(out)


@given(st.integers(0, 10_000))
def test_connect_stays_in_complement(index):
    d = CombDomain.build(1 / 3)
    _, x, y = sample_pair(d, 11, index)
    gamma, _ = connect(x, y, d)
    pts = _samples(gamma)
    assert not np.any(classify(d, pts[:, 0], pts[:, 1]) == Region.INTERIOR)


def test_estimate_single_pair(comb13):
    est = estimate_C(comb13, 1.2, 1, seed=4)
    _, x, y = sample_pair(comb13, 4, 0)
    assert est.value == pytest.approx(pair_ratio(comb13, 1.2, x, y)[1], rel=1e-14)
    assert est.worst_pair == (x, y)


def test_estimate_deterministic_and_nested(comb13):
    a = estimate_C(comb13, 1.2, 12, seed=5)
    b = estimate_C(comb13, 1.2, 12, seed=5)
    c = estimate_C(comb13, 1.2, 24, seed=5)
    assert a.value == b.value and a.worst_pair == b.worst_pair
    assert [r.ratio for r in c.records[:12]] == [r.ratio for r in a.records]
    assert c.value >= a.value


def test_estimate_rejects_inadmissible(comb13):
    with pytest.raises(AdmissibilityError):
        estimate_C(comb13, 1.5, 3)


@given(st.integers(0, 5_000))
def test_ratio_reflection_invariant(index):
    d = CombDomain.build(1 / 3)
    _, x, y = sample_pair(d, 2, index)
    r1 = pair_ratio(d, 1.2, x, y)[1]
    r2 = pair_ratio(d, 1.2, (x[0], -x[1]), (y[0], -y[1]))[1]
    assert r2 == pytest.approx(r1, rel=1e-7)


def test_case_ii_ratio_is_unbounded(comb13):
    # vertical drops cost a fixed amount while |x - y| shrinks: the ratio
    # along this curve family grows without bound (see the decisions ledger)
    ratios = [pair_ratio(comb13, 1.2, (0.5, 0.15), (0.5 + d, 0.15))[1] for d in (1e-2, 1e-3, 1e-4)]
    assert ratios[0] < ratios[1] < ratios[2]
    assert ratios[2] > 159.83
