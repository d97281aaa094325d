"""The comb domain: the square (-1, 1)^2 minus the tent {x >= 0, |y| <= d(x, C)}.

The removed tent K is a union of closed "diamonds" ``|x - m| + |y| <= w``,
one over every removed gap (centre m, half width w), glued at the Cantor
points on the axis. Truncating at level n replaces everything inside a
level-n closed interval by that interval's own diamond, which is exactly the
tent of d_n, the distance to the level-n endpoint set.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .cantor import CantorParams, cantor_distance, endpoint_set
from .errors import DepthError

SQRT2 = math.sqrt(2.0)
POLYLINE_CAP = 20
RASTER_CAP = 8192


class Region(enum.IntEnum):
    INTERIOR = 0
    REMOVED = 1
    OUTSIDE = 2
    BOUNDARY = 3


class Point2(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class CombDomain:
    cantor: CantorParams
    tent_depth: int | None = None
    band: float | None = None

    def __post_init__(self):
        depth = self.cantor.max_depth if self.tent_depth is None else self.tent_depth
        if depth < 1 or depth > self.cantor.max_depth:
            raise DepthError(f"tent_depth must lie in 1..{self.cantor.max_depth}, got {depth}")
        object.__setattr__(self, "tent_depth", int(depth))
        if self.band is None:
            object.__setattr__(self, "band", 2.0 * self.cantor.lam ** depth)

    @classmethod
    def build(cls, lam: float, depth: int = 40, **kw) -> "CombDomain":
        return cls(CantorParams(lam, depth), **kw)

    @property
    def lam(self) -> float:
        return self.cantor.lam

    @property
    def truncation_error(self) -> float:
        return self.cantor.lam ** self.tent_depth

    def tent_height(self, x):
        """d_n(x) and its certified error, with n = tent_depth."""
        return cantor_distance(x, self.cantor, self.tent_depth)


def _cone_distance(x, y):
    """Distance from points with x < 0 to the cone {|v| <= u}."""
    ay = np.abs(y)
    return np.where(ay <= -x, np.hypot(x, y), (ay - x) / SQRT2)


def _classify_core(x, y, tent_cols, v, e, tol) -> np.ndarray:
    s = np.maximum(np.abs(x), np.abs(y))
    out = np.full(np.shape(s), Region.INTERIOR, dtype=np.int8)
    ay = np.abs(y)
    removed = tent_cols & (ay < v - e - tol)
    ambiguous = tent_cols & ~removed & (ay <= v + tol)
    left = x < 0.0
    if np.any(left):
        ambiguous = ambiguous | (left & (_cone_distance(np.where(left, x, -1.0), y) <= tol))
    out[removed] = Region.REMOVED
    out[ambiguous] = Region.BOUNDARY
    out[np.abs(s - 1.0) <= tol] = Region.BOUNDARY
    out[s > 1.0 + tol] = Region.OUTSIDE
    return out


def _tent_on(domain: CombDomain, x: np.ndarray):
    cols = (x >= 0.0) & (x <= 1.0)
    v = np.zeros(x.shape)
    e = np.zeros(x.shape)
    if cols.any():
        v[cols], e[cols] = domain.tent_height(x[cols])
    return cols, v, e


def classify(domain: CombDomain, x, y) -> np.ndarray:
    """Vectorized region codes (see :class:`Region`) for coordinate arrays.

    A point is flagged BOUNDARY when the decision could flip within
    ``domain.band`` or within the certified error of d_n.
    """
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    cols, v, e = _tent_on(domain, x)
    return _classify_core(x, y, cols, v, e, domain.band)


def contains(domain: CombDomain, z) -> Region:
    return Region(int(classify(domain, z[0], z[1])))


# --- distance to the boundary -------------------------------------------------


def _diamond_distance(px: float, py: float, a: float, b: float) -> float:
    """Euclidean distance from (px, py) to the closed diamond over [a, b]."""
    half = 0.5 * (b - a)
    dx = abs(px - 0.5 * (a + b))
    dy = abs(py)
    # rotate by 45 degrees: the diamond becomes an axis-aligned square
    u = (dx + dy) / SQRT2
    w = (dx - dy) / SQRT2
    r = half / SQRT2
    qu = abs(u) - r
    qw = abs(w) - r
    return math.hypot(max(qu, 0.0), max(qw, 0.0))


def _box_exterior_distance(x, y):
    dx = np.maximum(np.abs(x) - 1.0, 0.0)
    dy = np.maximum(np.abs(y) - 1.0, 0.0)
    return np.hypot(dx, dy)


def _tent_distance_bnb(domain: CombDomain, px: float, py: float, best: float,
                       node_budget: int = 200_000):
    """Branch and bound over the Cantor tree for the distance to K_n.

    Each closed interval [a, b] is pruned when the diamond over it (which
    contains every piece of the tent above [a, b]) is already farther than
    the incumbent. Returns (distance, touched_truncated_leaf).
    """
    lam = domain.lam
    n = domain.tent_depth
    py = abs(py)
    best = min(best, math.hypot(px, py), math.hypot(px - 1.0, py))
    truncated = False
    stack = [(0.0, 1.0, 0)]
    visited = 0
    while stack:
        a, b, k = stack.pop()
        visited += 1
        if visited > node_budget:
            raise RuntimeError("boundary distance search exceeded its node budget")
        lb = _diamond_distance(px, py, a, b)
        if lb >= best:
            continue
        if k == n:
            best = lb
            truncated = True
            continue
        w = b - a
        il, ir = a + lam * w, b - lam * w
        best = min(best, _diamond_distance(px, py, il, ir),
                   math.hypot(px - il, py), math.hypot(px - ir, py))
        # nearer child last so it is popped first
        if abs(px - 0.5 * (a + il)) < abs(px - 0.5 * (ir + b)):
            stack.append((ir, b, k + 1))
            stack.append((a, il, k + 1))
        else:
            stack.append((a, il, k + 1))
            stack.append((ir, b, k + 1))
    return best, truncated


def boundary_distance(domain: CombDomain, x, y):
    """Distance to the boundary with a certified error bound.

    * outside the closed square: distance to the square (exact);
    * inside the tent: distance to the edge of the enclosing diamond (exact
      once x is localized in a gap, else bounded by the truncation error);
    * inside the domain: min of wall distance and a pruned search over the
      tent diamonds (error lam**tent_depth if a truncated leaf was involved).

    Accepts scalars or arrays; returns ``(value, error)`` of matching shape.
    """
    scalar = np.ndim(x) == 0 and np.ndim(y) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    x, y = np.broadcast_arrays(x, y)
    x = x.ravel()
    y = y.ravel()
    value = np.empty(x.size)
    error = np.zeros(x.size)

    s = np.maximum(np.abs(x), np.abs(y))
    outside = s >= 1.0
    value[outside] = _box_exterior_distance(x[outside], y[outside])

    inside = ~outside
    wall = 1.0 - s
    tent_x = inside & (x >= 0.0) & (x <= 1.0)
    v = np.zeros(x.size)
    e = np.zeros(x.size)
    if tent_x.any():
        v[tent_x], e[tent_x] = domain.tent_height(x[tent_x])
    ay = np.abs(y)
    in_tent = tent_x & (ay <= v)
    if in_tent.any():
        value[in_tent] = np.minimum((v[in_tent] - ay[in_tent]) / SQRT2, wall[in_tent])
        # e > 0 only inside an unresolved level-n interval
        error[in_tent] = np.where(e[in_tent] > 0.0, domain.truncation_error, 0.0)

    rest = np.flatnonzero(inside & ~in_tent)
    trunc = domain.truncation_error
    for i in rest:
        d, touched = _tent_distance_bnb(domain, float(x[i]), float(y[i]), float(wall[i]))
        value[i] = d
        error[i] = trunc if touched else 0.0

    if scalar:
        return float(value[0]), float(error[0])
    return value, error


# --- polyline, raster ---------------------------------------------------------


def tent_vertices(domain: CombDomain, depth: int | None = None) -> np.ndarray:
    """Vertices of the upper tent y = d_n(x) on [0, 1], left to right."""
    n = domain.tent_depth if depth is None else depth
    if n > POLYLINE_CAP:
        raise DepthError(f"polyline depth {n} exceeds cap {POLYLINE_CAP}")
    if n > domain.cantor.max_depth:
        raise DepthError(f"polyline depth {n} exceeds max_depth {domain.cantor.max_depth}")
    ends = endpoint_set(domain.cantor, n)
    mids = 0.5 * (ends[:-1] + ends[1:])
    heights = 0.5 * (ends[1:] - ends[:-1])
    xs = np.empty(2 * ends.size - 1)
    ys = np.zeros_like(xs)
    xs[0::2] = ends
    xs[1::2] = mids
    ys[1::2] = heights
    return np.column_stack([xs, ys])


def boundary_polyline(domain: CombDomain, depth: int | None = None) -> list[np.ndarray]:
    """[square loop, upper tent, lower tent] as (k, 2) vertex arrays.

    The tent uses d_n >= d with d_n - d <= lam**n, so the drawn removed set
    contains the true one.
    """
    square = np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0]])
    upper = tent_vertices(domain, depth)
    lower = upper * np.array([1.0, -1.0])
    return [square, upper, lower]


def segment_distances(points: np.ndarray, vertices: np.ndarray) -> np.ndarray:
    """Brute-force min distance from each point to a polyline (test oracle)."""
    p = np.asarray(points, dtype=float).reshape(-1, 2)
    a = vertices[:-1]
    d = vertices[1:] - a
    dd = np.einsum("ij,ij->i", d, d)
    dd[dd == 0.0] = 1.0
    out = np.full(p.shape[0], np.inf)
    chunk = max(1, 2_000_000 // max(len(a), 1))
    for s in range(0, p.shape[0], chunk):
        q = p[s:s + chunk, None, :] - a[None, :, :]
        t = np.clip(np.einsum("kij,ij->ki", q, d) / dd, 0.0, 1.0)
        r = q - t[..., None] * d[None, :, :]
        out[s:s + chunk] = np.sqrt(np.einsum("kij,kij->ki", r, r).min(axis=1))
    return out


@dataclass
class RasterBall:
    center: Point2
    radius: float
    resolution: int
    occupancy: np.ndarray  # int8: 1 in domain, 0 not in domain, -1 outside ball
    offsets: np.ndarray = field(repr=False)

    IN = 1
    OUT = 0
    OFF = -1

    @property
    def cell_size(self) -> float:
        return 2.0 * self.radius / self.resolution

    @property
    def xs(self) -> np.ndarray:
        return self.center[0] + self.offsets

    @property
    def ys(self) -> np.ndarray:
        return self.center[1] + self.offsets

    @property
    def in_domain(self) -> np.ndarray:
        return self.occupancy == self.IN


def raster(domain: CombDomain, center, radius: float, resolution: int,
           max_resolution: int = RASTER_CAP) -> RasterBall:
    """Sample Omega ∩ B(center, radius) on a square lattice.

    Cell centres sit at ``center + k * h`` for k = -res/2 .. res/2 with
    h = 2 * radius / resolution, so the ball centre is itself a cell centre
    and doubling the resolution keeps every old cell centre. Row index is y.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    if resolution < 16 or resolution % 2:
        raise ValueError("resolution must be an even integer >= 16")
    if resolution > max_resolution:
        raise MemoryError(f"resolution {resolution} exceeds cap {max_resolution}")
    cx, cy = float(center[0]), float(center[1])
    h = 2.0 * radius / resolution
    offsets = (np.arange(resolution + 1) - resolution // 2) * h
    xs = cx + offsets
    ys = cy + offsets
    in_ball = (offsets[None, :] ** 2 + offsets[:, None] ** 2) < radius * radius

    codes = _classify_grid(domain, xs, ys)
    occ = np.where(codes == Region.INTERIOR, RasterBall.IN, RasterBall.OUT).astype(np.int8)
    occ[~in_ball] = RasterBall.OFF
    return RasterBall(Point2(cx, cy), float(radius), int(resolution), occ, offsets)


def _classify_grid(domain: CombDomain, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """classify() on the tensor grid ys x xs, evaluating d_n once per column."""
    cols, v, e = _tent_on(domain, xs)
    X, Y = np.broadcast_arrays(xs[None, :], ys[:, None])
    return _classify_core(X, Y, cols[None, :], v[None, :], e[None, :], domain.band)
