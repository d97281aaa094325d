import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cantorcomb.cantor import (CantorParams, cantor_distance, endpoint_set, gap_intervals,
                               iter_level_intervals, level_intervals, locate)
from cantorcomb.errors import DepthError

lams = st.floats(min_value=0.05, max_value=0.49)


def brute_distance(x, lam, level):
    """Distance to the level-n endpoint set; within lam**level of the true distance."""
    ends = endpoint_set(CantorParams(lam, level), level)
    return float(np.min(np.abs(ends - x)))


def test_params_validation():
    for bad in (0.0, 0.5, -0.1, 0.7):
        with pytest.raises(ValueError):
            CantorParams(bad)
    with pytest.raises(ValueError):
        CantorParams(0.3, 0)
    assert CantorParams(1 / 3).dimension == pytest.approx(math.log(2) / math.log(3))


def test_level_zero_and_one():
    p = CantorParams(1 / 3, 5)
    (iv,) = level_intervals(p, 0)
    assert (iv.left, iv.right, iv.kind) == (0.0, 1.0, "closed")
    a, b = level_intervals(p, 1)
    assert (a.left, a.right) == pytest.approx((0, 1 / 3))
    assert (b.left, b.right) == pytest.approx((2 / 3, 1))


def test_level_two_lam04():
    ivs = level_intervals(CantorParams(0.4, 3), 2)
    assert len(ivs) == 4
    assert all(iv.length == pytest.approx(0.16, abs=1e-15) for iv in ivs)


def test_gap_examples():
    p = CantorParams(1 / 3, 4)
    (g,) = gap_intervals(p, 1)
    assert (g.left, g.right) == pytest.approx((1 / 3, 2 / 3))
    g1, g2 = gap_intervals(p, 2)
    assert (g1.left, g1.right) == pytest.approx((1 / 9, 2 / 9))
    assert (g2.left, g2.right) == pytest.approx((7 / 9, 8 / 9))
    (q,) = gap_intervals(CantorParams(0.25, 2), 1)
    assert (q.left, q.right, q.length) == (0.25, 0.75, 0.5)


def test_depth_errors():
    p = CantorParams(1 / 3, 3)
    with pytest.raises(DepthError):
        gap_intervals(p, 0)
    with pytest.raises(DepthError):
        level_intervals(p, 4)
    with pytest.raises(DepthError):
        level_intervals(CantorParams(0.3, 30), 25)  # materialization cap


@given(lams, st.integers(0, 10))
def test_closed_interval_invariants(lam, j):
    p = CantorParams(lam, 12)
    ivs = level_intervals(p, j)
    assert len(ivs) == 2 ** j
    lengths = np.array([iv.length for iv in ivs])
    assert np.allclose(lengths, lam ** j, rtol=1e-9, atol=1e-15)
    lefts = np.array([iv.left for iv in ivs])
    rights = np.array([iv.right for iv in ivs])
    assert np.all(rights[:-1] < lefts[1:])  # disjoint, ordered
    assert [iv.index for iv in ivs] == list(range(1, 2 ** j + 1))


@given(lams, st.integers(1, 10))
def test_gap_invariants(lam, j):
    p = CantorParams(lam, 12)
    gaps = gap_intervals(p, j)
    assert len(gaps) == 2 ** (j - 1)
    assert np.allclose([g.length for g in gaps], (1 - 2 * lam) * lam ** (j - 1),
                       rtol=1e-9, atol=1e-15)
    closed = level_intervals(p, j)
    for g in gaps:
        assert all(g.right <= iv.left or g.left >= iv.right for iv in closed)


@given(lams, st.integers(0, 8))
def test_union_decreasing(lam, j):
    p = CantorParams(lam, 10)
    parents = level_intervals(p, j)
    for child in level_intervals(p, j + 1):
        assert any(par.left <= child.left and child.right <= par.right for par in parents)


def test_lazy_walk_matches_materialized():
    p = CantorParams(0.3, 8)
    lazy = [(iv.left, iv.right) for iv in iter_level_intervals(p, 6)]
    eager = [(iv.left, iv.right) for iv in level_intervals(p, 6)]
    assert lazy == eager


def test_distance_examples():
    p = CantorParams(1 / 3, 40)
    assert cantor_distance(0.5, p) == pytest.approx((1 / 6, 0.0))
    assert cantor_distance(0.5, p).error == 0.0
    assert cantor_distance(0.0, p).value == 0.0
    assert tuple(cantor_distance(-0.2, p)) == (0.2, 0.0)
    assert tuple(cantor_distance(1.3, p)) == pytest.approx((0.3, 0.0))


@given(lams, st.floats(-0.5, 1.5))
def test_distance_against_endpoint_oracle(lam, x):
    n = 14
    v, e = cantor_distance(x, CantorParams(lam, 40))
    assert e <= lam ** 40 + 1e-300
    assert abs(v - brute_distance(x, lam, n)) <= e + lam ** n + 1e-12


@given(lams, st.floats(-0.5, 1.5), st.floats(-0.5, 1.5))
def test_distance_lipschitz(lam, x, y):
    p = CantorParams(lam, 30)
    vx, ex = cantor_distance(x, p)
    vy, ey = cantor_distance(y, p)
    assert abs(vx - vy) <= abs(x - y) + ex + ey + 1e-12


@given(lams, st.floats(0.0, 1.0))
def test_distance_symmetry(lam, x):
    p = CantorParams(lam, 30)
    vx, ex = cantor_distance(x, p)
    vy, ey = cantor_distance(1.0 - x, p)
    assert abs(vx - vy) <= ex + ey + 1e-12


@given(lams, st.integers(1, 12), st.data())
def test_gap_midpoint_distance(lam, j, data):
    p = CantorParams(lam, 16)
    gaps = gap_intervals(p, j)
    g = gaps[data.draw(st.integers(0, len(gaps) - 1))]
    v, e = cantor_distance(g.midpoint, p)
    assert e == 0.0
    assert v == pytest.approx(0.5 * (1 - 2 * lam) * lam ** (j - 1), rel=1e-9)


@given(lams, st.floats(0.0, 1.0), st.integers(1, 20))
def test_refinement_never_increases_error(lam, x, n):
    p = CantorParams(lam, 40)
    assert cantor_distance(x, p, n + 1).error <= cantor_distance(x, p, n).error


def test_vectorized_matches_scalar():
    p = CantorParams(0.37, 30)
    xs = np.linspace(-0.3, 1.3, 101)
    v, e = cantor_distance(xs, p)
    for x, vi, ei in zip(xs, v, e):
        assert (vi, ei) == tuple(cantor_distance(float(x), p))


def test_locate():
    p = CantorParams(1 / 3, 10)
    assert locate(0.5, p)[:2] == ("gap", 1)
    kind, level, a, b = locate(0.0, p, 5)
    assert (kind, level, a) == ("closed", 5, 0.0) and b == pytest.approx(3.0 ** -5)
