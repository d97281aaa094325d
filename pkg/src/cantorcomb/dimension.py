"""Dimension proxies: closed-box counting and the separated-net sufficient condition.

Neither estimator computes Hausdorff dimension. Box counting regresses
log N(delta) on log(1/delta). The net test builds maximal lam**i-separated
nets and looks, for every level-i ball, for a deeper level j with
N_j < lam**(-(j-i) s); the smallest grid s for which every ball has such
a witness inside the built hierarchy bounds the dimension from above.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

_SNAP = 1e-9


@dataclass(frozen=True)
class PointSet:
    points: np.ndarray
    label: str = ""

    def __init__(self, points, label: str = ""):
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = np.column_stack([pts, np.zeros_like(pts)])
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError("points must be scalars or (n, 2) pairs")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        pts = np.unique(pts, axis=0)  # also sorts lexicographically
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "label", label)

    def __len__(self):
        return self.points.shape[0]


@dataclass
class DimensionEstimate:
    value: float
    method: str
    scale_range: tuple[float, float]
    diagnostics: dict = field(default_factory=dict)
    passed: bool = True

    def to_dict(self) -> dict:
        return {"value": self.value, "method": self.method,
                "scale_range": list(self.scale_range), "passed": self.passed}


# --- nets -------------------------------------------------------------------------


def separated_net(E: PointSet, scale: float) -> PointSet:
    """Greedy maximal scale-separated subset, scanning E in lexicographic order."""
    if scale <= 0:
        raise ValueError("scale must be positive")
    pts = E.points
    buckets: dict[tuple[int, int], list[int]] = {}
    chosen: list[int] = []
    for i, (x, y) in enumerate(pts):
        cx, cy = int(math.floor(x / scale)), int(math.floor(y / scale))
        ok = True
        for gx in (cx - 1, cx, cx + 1):
            for gy in (cy - 1, cy, cy + 1):
                for k in buckets.get((gx, gy), ()):
                    if math.hypot(pts[k, 0] - x, pts[k, 1] - y) < scale:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            chosen.append(i)
            buckets.setdefault((cx, cy), []).append(i)
    return PointSet(pts[chosen], label=f"{E.label}|net({scale:.3g})")


@dataclass
class NetHierarchy:
    ratio: float
    base_level: int
    levels: dict[int, np.ndarray]
    counts: dict[tuple[int, int, int], int]

    @property
    def top_level(self) -> int:
        return max(self.levels)

    def ball_count(self, i: int) -> int:
        return self.levels[i].shape[0]


def build_hierarchy(E: PointSet, lam: float, i0: int, depth: int) -> NetHierarchy:
    """Nets at scales lam**i for i = i0..i0+depth and every count N_j (j > i).

    N_j for ball k of level i counts level-j centres l whose open ball
    B(x_l, lam**j) meets B(x_k, lam**i), i.e. |x_l - x_k| < lam**i + lam**j.
    """
    if not 0.0 < lam < 1.0:
        raise ValueError("ratio must lie in (0, 1)")
    if depth < 2:
        raise ValueError("depth must be >= 2")
    if len(E) == 0:
        raise ValueError("cannot build a hierarchy on an empty set")
    levels = {i: separated_net(E, lam ** i).points for i in range(i0, i0 + depth + 1)}
    trees = {i: cKDTree(pts) for i, pts in levels.items()}
    counts: dict[tuple[int, int, int], int] = {}
    for i in range(i0, i0 + depth + 1):
        centres = levels[i]
        for j in range(i + 1, i0 + depth + 1):
            reach = lam ** i + lam ** j
            neighbours = trees[j].query_ball_point(centres, reach)
            fine = levels[j]
            for k, idx in enumerate(neighbours):
                if idx:
                    d = np.hypot(*(fine[idx] - centres[k]).T)
                    counts[(i, k, j)] = int(np.count_nonzero(d < reach))
                else:
                    counts[(i, k, j)] = 0
    return NetHierarchy(lam, i0, levels, counts)


def default_s_grid(step: float = 0.01) -> np.ndarray:
    return np.round(np.arange(0.0, 2.0 + 0.5 * step, step), 10)


def _ball_witness(h: NetHierarchy, i: int, k: int, s: float):
    for j in range(i + 1, h.top_level + 1):
        n = h.counts[(i, k, j)]
        if n < h.ratio ** (-(j - i) * s):
            return j, n
    return None


def net_dimension_bound(h: NetHierarchy, s_grid=None, min_lookahead: int | None = None) -> DimensionEstimate:
    """Smallest grid s such that every tested ball has a witness level j.

    The criterion quantifies over every level i >= i0 and unbounded j. A finite
    hierarchy can only test balls that have at least ``min_lookahead``
    deeper levels below them (default: half the hierarchy depth); the
    remaining levels are reported as untested in the diagnostics.
    """
    grid = default_s_grid() if s_grid is None else np.asarray(s_grid, dtype=float)
    if np.any(np.diff(grid) < 0) or grid.min() < 0 or grid.max() > 2:
        raise ValueError("s_grid must be ascending within [0, 2]")
    depth = h.top_level - h.base_level
    look = max(1, depth // 2) if min_lookahead is None else int(min_lookahead)
    if not 1 <= look <= depth:
        raise ValueError(f"min_lookahead must lie in 1..{depth}")
    last_tested = h.top_level - look
    balls = [(i, k) for i in range(h.base_level, last_tested + 1) for k in range(h.ball_count(i))]
    scale_range = (h.ratio ** h.top_level, h.ratio ** h.base_level)
    untested = list(range(last_tested + 1, h.top_level + 1))
    failed = None
    for s in grid:
        table = []
        failed = None
        for i, k in balls:
            w = _ball_witness(h, i, k, s)
            if w is None:
                failed = (i, k)
                break
            table.append((i, k, w[0], w[1]))
        if failed is None:
            exhausted = sum(1 for row in table if row[2] == h.top_level)
            return DimensionEstimate(
                float(s), "net", scale_range,
                {"table": table, "balls_at_budget": exhausted, "untested_levels": untested,
                 "violating_ball": None})
    i, k = failed
    return DimensionEstimate(
        float("nan"), "net", scale_range,
        {"table": [], "untested_levels": untested,
         "violating_ball": {"i": i, "k": k, "centre": h.levels[i][k].tolist()}},
        passed=False)


def resolution_level(E: PointSet, lam: float) -> int:
    """Deepest level i with lam**i no finer than the closest pair in E."""
    if len(E) < 2:
        return 0
    d, _ = cKDTree(E.points).query(E.points, k=2)
    spacing = float(d[:, 1].min())
    return int(math.floor(math.log(spacing) / math.log(lam) + 1e-9))


def net_dimension(E: PointSet, lam: float = 0.5, i0: int = 1, s_grid=None,
                  min_lookahead: int | None = None) -> tuple[DimensionEstimate, NetHierarchy]:
    """Build the hierarchy down to E's own resolution and run the net test."""
    top = max(i0 + 2, resolution_level(E, lam))
    h = build_hierarchy(E, lam, i0, top - i0)
    return net_dimension_bound(h, s_grid, min_lookahead), h


# --- box counting -------------------------------------------------------------------


def _candidate_cells(q: np.ndarray) -> list[tuple[int, ...]]:
    """Indices of the closed grid cells containing a point (1 or 2 per axis)."""
    per_axis = []
    for c in q:
        r = round(c)
        if abs(c - r) <= _SNAP * max(1.0, abs(c)):
            per_axis.append((int(r) - 1, int(r)))
        else:
            per_axis.append((int(math.floor(c)),))
    cells = [()]
    for opts in per_axis:
        cells = [cell + (o,) for cell in cells for o in opts]
    return cells


def count_boxes(E: PointSet, delta: float, origin=None) -> int:
    """Number of closed delta-boxes of the grid anchored at ``origin`` needed to cover E.

    Points off grid lines have one box; points on a grid line may use either
    neighbour and take an already occupied one when possible (greedy).
    """
    pts = E.points
    o = pts.min(axis=0) if origin is None else np.asarray(origin, dtype=float)
    q = (pts - o) / delta
    occupied: set[tuple[int, ...]] = set()
    pending = []
    for row in q:
        cells = _candidate_cells(row)
        if len(cells) == 1:
            occupied.add(cells[0])
        else:
            pending.append(cells)
    for cells in pending:
        if not any(c in occupied for c in cells):
            occupied.add(cells[-1])
    return len(occupied)


def box_count(E: PointSet, scales, origin=None) -> DimensionEstimate:
    """Least-squares slope of log N(delta) against log(1/delta)."""
    scales = np.asarray(sorted(scales, reverse=True), dtype=float)
    if scales.size < 3:
        raise ValueError("box counting needs at least 3 scales")
    if scales.max() / scales.min() < 4.0:
        raise ValueError("scales must span a ratio of at least 4")
    counts = np.array([count_boxes(E, d, origin) for d in scales])
    x = np.log(1.0 / scales)
    y = np.log(counts)
    if len(E) == 1:
        return DimensionEstimate(0.0, "box", (scales.min(), scales.max()),
                                 {"counts": counts.tolist(), "scales": scales.tolist(),
                                  "residual": 0.0})
    if np.unique(counts).size < 2:
        raise ValueError("degenerate regression: box counts do not vary")
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    value = float(min(max(slope, 0.0), 2.0))
    return DimensionEstimate(value, "box", (float(scales.min()), float(scales.max())),
                             {"counts": counts.tolist(), "scales": scales.tolist(),
                              "slope": float(slope), "residual": resid})


def cantor_endpoints(lam: float, depth: int) -> PointSet:
    from .cantor import CantorParams, endpoint_set

    return PointSet(endpoint_set(CantorParams(lam, max(depth, 1)), depth),
                    label=f"C_{lam:g} endpoints, level {depth}")


def aligned_scales(lam: float, first: int, last: int) -> list[float]:
    return [lam ** k for k in range(first, last + 1)]
