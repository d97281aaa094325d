"""Standard middle-interval Cantor set C_lambda.

Endpoints are produced by the two contractions ``x -> lam * x`` and
``x -> lam * x + 1 - lam`` applied to parent intervals, never by powers of
``lam``, so that enumeration and the distance recursion see bit-identical
coordinates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .errors import DepthError

#: interval lists above this level are refused (2**level entries)
MATERIALIZE_CAP = 24


@dataclass(frozen=True)
class CantorParams:
    lam: float
    max_depth: int = 40

    def __post_init__(self):
        if not (0.0 < self.lam < 0.5):
            raise ValueError(f"lambda must lie in (0, 1/2), got {self.lam!r}")
        if int(self.max_depth) != self.max_depth or self.max_depth < 1:
            raise ValueError(f"max_depth must be a positive integer, got {self.max_depth!r}")

    @property
    def dimension(self) -> float:
        """Similarity dimension log 2 / -log lambda."""
        return math.log(2.0) / -math.log(self.lam)


@dataclass(frozen=True)
class LevelInterval:
    level: int
    index: int  # 1-based, left to right
    kind: str  # "closed" or "gap"
    left: float
    right: float

    @property
    def length(self) -> float:
        return self.right - self.left

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.left + self.right)


class CantorDistance(NamedTuple):
    value: np.ndarray | float
    error: np.ndarray | float


def _split(left: np.ndarray, right: np.ndarray, lam: float):
    """Children and middle gap of each closed interval [left, right]."""
    width = right - left
    inner_left = left + lam * width
    inner_right = right - lam * width
    return inner_left, inner_right


def level_endpoints(params: CantorParams, j: int, cap: int = MATERIALIZE_CAP):
    """Left/right endpoint arrays of the 2**j closed intervals at level j."""
    _check_level(params, j, cap, lowest=0)
    left = np.array([0.0])
    right = np.array([1.0])
    for _ in range(j):
        inner_left, inner_right = _split(left, right, params.lam)
        left = np.column_stack([left, inner_right]).ravel()
        right = np.column_stack([inner_left, right]).ravel()
    return left, right


def gap_endpoints(params: CantorParams, j: int, cap: int = MATERIALIZE_CAP):
    """Left/right endpoint arrays of the 2**(j-1) open gaps removed at level j."""
    if j == 0:
        raise DepthError("no interval is removed at level 0")
    _check_level(params, j, cap, lowest=1)
    left, right = level_endpoints(params, j - 1, cap)
    return _split(left, right, params.lam)


def _check_level(params: CantorParams, j: int, cap: int, lowest: int) -> None:
    if j < lowest:
        raise DepthError(f"level must be >= {lowest}, got {j}")
    if j > params.max_depth:
        raise DepthError(f"level {j} exceeds max_depth {params.max_depth}")
    if j > cap:
        raise DepthError(f"level {j} exceeds materialization cap {cap}")


def level_intervals(params: CantorParams, j: int) -> list[LevelInterval]:
    left, right = level_endpoints(params, j)
    return [LevelInterval(j, i + 1, "closed", float(a), float(b))
            for i, (a, b) in enumerate(zip(left, right))]


def gap_intervals(params: CantorParams, j: int) -> list[LevelInterval]:
    left, right = gap_endpoints(params, j)
    return [LevelInterval(j, i + 1, "gap", float(a), float(b))
            for i, (a, b) in enumerate(zip(left, right))]


def iter_level_intervals(params: CantorParams, j: int) -> Iterator[LevelInterval]:
    """Lazily walk the level-j closed intervals left to right (no cap)."""
    if j < 0 or j > params.max_depth:
        raise DepthError(f"level {j} outside 0..{params.max_depth}")
    lam = params.lam
    count = 0

    def walk(a: float, b: float, k: int):
        nonlocal count
        if k == j:
            count += 1
            yield LevelInterval(j, count, "closed", a, b)
            return
        w = b - a
        yield from walk(a, a + lam * w, k + 1)
        yield from walk(b - lam * w, b, k + 1)

    yield from walk(0.0, 1.0, 0)


def endpoint_set(params: CantorParams, j: int) -> np.ndarray:
    """Sorted distinct endpoints of the level-j closed intervals (2**(j+1) points)."""
    left, right = level_endpoints(params, j)
    return np.column_stack([left, right]).ravel()


def cantor_distance(x, params: CantorParams, depth: int | None = None) -> CantorDistance:
    """Distance from x to C_lambda with a certified error bound.

    Descends through the closed intervals containing x. Once x falls into a
    removed gap (or lies outside [0, 1]) the distance is exact and the error
    is zero. If x is still inside a closed interval [a, b] after ``depth``
    levels, the returned value is min(x - a, b - x), an upper bound, and the
    error equals that value since the true distance lies in [0, value].

    Works on scalars and numpy arrays alike.
    """
    n = params.max_depth if depth is None else depth
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    value = np.zeros_like(xs)
    error = np.zeros_like(xs)

    below = xs < 0.0
    above = xs > 1.0
    value[below] = -xs[below]
    value[above] = xs[above] - 1.0

    idx = np.flatnonzero(~(below | above))
    a = np.zeros(idx.size)
    b = np.ones(idx.size)
    lam = params.lam
    for _ in range(n):
        if idx.size == 0:
            break
        px = xs[idx]
        inner_left, inner_right = _split(a, b, lam)
        in_gap = (px > inner_left) & (px < inner_right)
        if in_gap.any():
            value[idx[in_gap]] = np.minimum(px[in_gap] - inner_left[in_gap],
                                            inner_right[in_gap] - px[in_gap])
        go_left = px <= inner_left
        go_right = px >= inner_right
        b = np.where(go_left, inner_left, b)
        a = np.where(go_right, inner_right, a)
        keep = ~in_gap
        idx, a, b = idx[keep], a[keep], b[keep]

    if idx.size:
        px = xs[idx]
        rest = np.minimum(px - a, b - px)
        value[idx] = rest
        error[idx] = rest

    if scalar:
        return CantorDistance(float(value[0]), float(error[0]))
    return CantorDistance(value, error)


def locate(x: float, params: CantorParams, depth: int | None = None):
    """Return ("gap", level, left, right) or ("closed", depth, left, right) for x in [0, 1]."""
    n = params.max_depth if depth is None else depth
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    a, b = 0.0, 1.0
    lam = params.lam
    for k in range(n):
        w = b - a
        inner_left, inner_right = a + lam * w, b - lam * w
        if inner_left < x < inner_right:
            return "gap", k + 1, inner_left, inner_right
        if x <= inner_left:
            b = inner_left
        else:
            a = inner_right
    return "closed", n, a, b
