"""Curve-condition integrals on the comb domain.

Integrand along a curve gamma in the closed complement of the domain:
dist(z, boundary)**(1 - p).  Three evaluation routes:

* generic segments: graded adaptive Gauss-Kronrod on the certified lower
  boundary distance;
* segments on the axis inside [0, 1]: walk the Cantor tree, using the exact
  per-gap antiderivative for partially covered gaps and the geometric series
  closed form for fully covered closed intervals (the integrand has a
  singularity at every Cantor point, so subdivision alone cannot converge);
* closed forms for the profile, gap and interval-series integrals.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np

from .cantor import cantor_distance
from .domain import CombDomain, Point2, Region, boundary_distance, classify
from .errors import AdmissibilityError, ConvergenceError, PreconditionError
from .quadrature import DEFAULT_BUDGET, graded_segment_integral

SQRT2 = math.sqrt(2.0)
SQUARE_CORNERS = ((1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0))
WALL_POINT = (1.0, 0.0)


def check_exponent(p: float) -> float:
    if not (1.0 < p < 2.0):
        raise ValueError(f"exponent p must lie in (1, 2), got {p!r}")
    return float(p)


def is_admissible(p: float, lam: float) -> bool:
    return 2.0 * lam ** (2.0 - p) < 1.0


def require_admissible(p: float, lam: float) -> None:
    if not is_admissible(p, lam):
        raise AdmissibilityError(p, lam)


@dataclass(frozen=True)
class Polyline:
    """Vertex list; consecutive duplicates are dropped on construction."""

    vertices: np.ndarray

    def __init__(self, vertices):
        v = np.asarray(vertices, dtype=float).reshape(-1, 2)
        if v.shape[0] < 1:
            raise ValueError("a polyline needs at least one vertex")
        if not np.all(np.isfinite(v)):
            raise ValueError("polyline vertices must be finite")
        keep = np.ones(v.shape[0], dtype=bool)
        keep[1:] = np.any(v[1:] != v[:-1], axis=1)
        object.__setattr__(self, "vertices", v[keep])

    def __len__(self):
        return self.vertices.shape[0]

    @property
    def segments(self):
        return list(zip(self.vertices[:-1], self.vertices[1:]))

    @property
    def length(self) -> float:
        return float(np.linalg.norm(np.diff(self.vertices, axis=0), axis=1).sum())

    def reversed(self) -> "Polyline":
        return Polyline(self.vertices[::-1])

    def __add__(self, other: "Polyline") -> "Polyline":
        return Polyline(np.vstack([self.vertices, other.vertices]))


class IntegralResult(NamedTuple):
    value: float
    error: float


# --- closed forms ---------------------------------------------------------------


def segment_profile_integral(L: float, p: float) -> float:
    """2**((1-p)/2) * L**(2-p) / (2-p): the per-segment bound for curves outside the square."""
    check_exponent(p)
    if L < 0:
        raise ValueError("length must be non-negative")
    return 2.0 ** ((1.0 - p) / 2.0) * L ** (2.0 - p) / (2.0 - p)


def gap_closed_form(j: int, p: float, lam: float) -> float:
    """Integral of dist**(1-p) along the axis across one level-j gap."""
    check_exponent(p)
    if j < 1:
        raise ValueError("gap level must be >= 1")
    gap = (1.0 - 2.0 * lam) * lam ** (j - 1)
    return 2.0 ** (1.5 * (p - 1.0)) / (2.0 - p) * gap ** (2.0 - p)


def interval_series_closed_form(j: int, p: float, lam: float) -> float:
    """Integral along the axis across a whole level-j closed interval."""
    check_exponent(p)
    require_admissible(p, lam)
    return _series_for_length(lam ** j, p, lam)


def _series_for_length(length: float, p: float, lam: float) -> float:
    r = lam ** (2.0 - p)
    return (2.0 ** (1.5 * (p - 1.0)) / (2.0 - p) * (1.0 - 2.0 * lam) ** (2.0 - p)
            * length ** (2.0 - p) / (1.0 - 2.0 * r))


def partial_gap_sum(j: int, p: float, lam: float, terms: int) -> float:
    """sum_{k=j}^{j+terms-1} 2**(k-j) * gap_closed_form(k+1): truncated series oracle."""
    return math.fsum(2.0 ** (k - j) * gap_closed_form(k + 1, p, lam) for k in range(j, j + terms))


# --- axis integration -------------------------------------------------------------


def _profile_antiderivative(t: float, p: float) -> float:
    """F(t) = int_0^t (s / sqrt 2)**(1-p) ds."""
    return 2.0 ** ((p - 1.0) / 2.0) * t ** (2.0 - p) / (2.0 - p)


def _gap_piece(u: float, v: float, left: float, right: float, p: float) -> float:
    """Integral over [u, v] ∩ (left, right) of (min(x-left, right-x)/sqrt 2)**(1-p)."""
    lo, hi = max(u, left), min(v, right)
    if hi <= lo:
        return 0.0
    mid = 0.5 * (left + right)
    total = 0.0
    if lo < mid:
        a, b = lo, min(hi, mid)
        total += _profile_antiderivative(b - left, p) - _profile_antiderivative(a - left, p)
    if hi > mid:
        a, b = max(lo, mid), hi
        total += _profile_antiderivative(right - a, p) - _profile_antiderivative(right - b, p)
    return total


def axis_integral(u: float, v: float, p: float, lam: float, rtol: float = 1e-12) -> IntegralResult:
    """Integral of dist**(1-p) along [u, v] x {0}, with 0 <= u <= v <= 1.

    On the axis the boundary distance is d(x, C)/sqrt(2) inside each gap.
    Closed intervals fully inside [u, v] contribute their series closed
    form; partially covered ones are refined until their full contribution
    is negligible, at which point half of it is booked as the estimate and
    half as the error.
    """
    check_exponent(p)
    if not (0.0 <= u <= v <= 1.0):
        raise ValueError("axis integral needs 0 <= u <= v <= 1")
    if v == u:
        return IntegralResult(0.0, 0.0)
    # without admissibility the series diverge, but a stretch of axis that
    # only crosses gaps is still finite; such pieces are integrated exactly
    admissible = is_admissible(p, lam)
    if admissible:
        scale = _series_for_length(v - u, p, lam)
    else:
        scale = 2.0 * _profile_antiderivative(0.5 * (v - u), p)
    floor = rtol * scale
    total = 0.0
    error = 0.0
    stack = [(0.0, 1.0)]
    while stack:
        a, b = stack.pop()
        if b <= u or a >= v:
            continue
        if not admissible and (u <= a and b <= v or b - a <= 4.0 * np.finfo(float).eps):
            raise AdmissibilityError(p, lam)
        full = _series_for_length(b - a, p, lam) if admissible else math.inf
        if u <= a and b <= v:
            total += full
            continue
        if full <= floor or b - a <= 4.0 * np.finfo(float).eps:
            total += 0.5 * full
            error += 0.5 * full
            continue
        w = b - a
        il, ir = a + lam * w, b - lam * w
        total += _gap_piece(u, v, il, ir, p)
        stack.append((a, il))
        stack.append((ir, b))
    return IntegralResult(total, error)


# --- polyline integral -----------------------------------------------------------


def _on_axis_unit(a: np.ndarray, b: np.ndarray) -> bool:
    return a[1] == 0.0 and b[1] == 0.0 and 0.0 <= min(a[0], b[0]) and max(a[0], b[0]) <= 1.0


def _split_at_corners(a: np.ndarray, b: np.ndarray) -> list[np.ndarray]:
    """Cut a segment at square corners lying strictly inside it."""
    d = b - a
    dd = float(d @ d)
    cuts = []
    for c in SQUARE_CORNERS:
        c = np.asarray(c)
        t = float((c - a) @ d) / dd
        if 1e-12 < t < 1.0 - 1e-12 and np.linalg.norm(a + t * d - c) < 1e-12:
            cuts.append(t)
    pts = [a] + [a + t * d for t in sorted(cuts)] + [b]
    return pts


def _check_in_complement(domain: CombDomain, gamma: Polyline, samples: int = 64) -> None:
    for a, b in gamma.segments:
        t = np.linspace(0.0, 1.0, samples)
        pts = a[None, :] + t[:, None] * (b - a)[None, :]
        codes = classify(domain, pts[:, 0], pts[:, 1])
        bad = np.flatnonzero(codes == Region.INTERIOR)
        if bad.size:
            z = pts[bad[0]]
            raise PreconditionError(
                f"curve enters the domain at ({z[0]:.6g}, {z[1]:.6g}) on segment "
                f"{tuple(a)} -> {tuple(b)}")


def polyline_integral(gamma: Polyline, p: float, domain: CombDomain, tol: float = 1e-8,
                      distance: Callable[[np.ndarray], np.ndarray] | None = None,
                      axis_closed_form: bool = True, check: bool = True,
                      budget: int = DEFAULT_BUDGET) -> IntegralResult:
    """Integral of dist(z, boundary)**(1-p) ds along ``gamma``.

    ``distance`` replaces the domain's boundary distance by a synthetic
    profile (vectorized over an (n, 2) array of points); no complement
    check is made in that case. With the real domain the certified lower
    distance (value - error) is used, so the result over-estimates.
    """
    check_exponent(p)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if len(gamma) < 2:
        return IntegralResult(0.0, 0.0)
    synthetic = distance is not None
    if not synthetic and check:
        _check_in_complement(domain, gamma)

    if not synthetic:
        def distance(pts):
            val, err = boundary_distance(domain, pts[:, 0], pts[:, 1])
            return val - err

    total = 0.0
    error = 0.0
    for a, b in gamma.segments:
        if not synthetic and axis_closed_form and _on_axis_unit(a, b):
            r = axis_integral(min(a[0], b[0]), max(a[0], b[0]), p, domain.lam, rtol=0.1 * tol)
            total += r.value
            error += r.error
            continue
        pts = _split_at_corners(a, b)
        for s0, s1 in zip(pts[:-1], pts[1:]):
            seg_len = float(np.linalg.norm(s1 - s0))
            direction = (s1 - s0) / seg_len

            def g(s, s0=s0, direction=direction):
                z = s0[None, :] + s[:, None] * direction[None, :]
                d = np.asarray(distance(z), dtype=float)
                with np.errstate(divide="ignore"):
                    return np.where(d > 0.0, d, 0.0) ** (1.0 - p)

            try:
                r = graded_segment_integral(g, seg_len, p, rtol=tol, budget=budget)
            except ConvergenceError as exc:
                raise ConvergenceError(str(exc), segment=(tuple(s0), tuple(s1))) from exc
            if not math.isfinite(r.value):
                raise ConvergenceError("integrand is not integrable on segment",
                                       segment=(tuple(s0), tuple(s1)))
            total += r.value
            error += r.error
    return IntegralResult(total, error)


# --- connecting curves -------------------------------------------------------------


def _enters_open_square(a, b, eps: float = 1e-12) -> bool:
    """Does segment [a, b] meet the open square (-1, 1)**2?"""
    a = np.asarray(a, dtype=float)
    d = np.asarray(b, dtype=float) - a
    t0, t1 = 0.0, 1.0
    for k in range(2):
        if d[k] == 0.0:
            if not (-1.0 < a[k] < 1.0):
                return False
            continue
        ta = (-1.0 - a[k]) / d[k]
        tb = (1.0 - a[k]) / d[k]
        lo, hi = min(ta, tb), max(ta, tb)
        t0, t1 = max(t0, lo), min(t1, hi)
        if t0 >= t1:
            return False
    mid = a + 0.5 * (t0 + t1) * d
    return bool(abs(mid[0]) < 1.0 - eps and abs(mid[1]) < 1.0 - eps)


def _diagonal_routes(a, b):
    """Paths from a to b built from at most two segments of slope +-1."""
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    if abs(abs(dx) - abs(dy)) <= 1e-14 * max(1.0, abs(dx), abs(dy)):
        return [[a, b]]
    routes = []
    for slope in (1.0, -1.0):
        x = 0.5 * (ax + bx) + (by - ay) / (2.0 * slope)
        y = ay + slope * (x - ax)
        routes.append([a, (x, y), b])
    return routes


def _route_length(route) -> float:
    return sum(math.dist(p, q) for p, q in zip(route[:-1], route[1:]))


def _best_diagonal_route(a, b):
    valid = [r for r in _diagonal_routes(a, b)
             if not any(_enters_open_square(p, q) for p, q in zip(r[:-1], r[1:]))]
    if not valid:
        return None
    # both two-leg routes have the same length; prefer the corner farther from
    # the origin so the choice commutes with reflections in either axis
    shortest = min(_route_length(r) for r in valid)
    tied = [r for r in valid if _route_length(r) <= shortest * (1 + 1e-12) + 1e-15]
    return max(tied, key=lambda r: math.hypot(*r[1]) if len(r) == 3 else 0.0)


def exterior_path(x, y) -> Polyline:
    """Shortest route of +-45 degree segments between two points off the open square.

    Dijkstra over {x, y, square corners}; each edge is the shorter valid
    two-segment diagonal route.
    """
    nodes = [tuple(map(float, x)), tuple(map(float, y))] + list(SQUARE_CORNERS)
    edges: dict[tuple[int, int], list] = {}
    for i in range(len(nodes)):
        for j in range(len(nodes)):
            if i != j:
                r = _best_diagonal_route(nodes[i], nodes[j])
                if r is not None:
                    edges[(i, j)] = r
    dist = {0: 0.0}
    prev: dict[int, int] = {}
    heap = [(0.0, 0)]
    done = set()
    while heap:
        d, i = heapq.heappop(heap)
        if i in done:
            continue
        done.add(i)
        if i == 1:
            break
        for j in range(len(nodes)):
            if (i, j) in edges and j not in done:
                nd = d + _route_length(edges[(i, j)])
                if nd < dist.get(j, math.inf) - 1e-15:
                    dist[j] = nd
                    prev[j] = i
                    heapq.heappush(heap, (nd, j))
    if 1 not in done:
        raise PreconditionError("no exterior diagonal route found")
    chain = [1]
    while chain[-1] != 0:
        chain.append(prev[chain[-1]])
    chain.reverse()
    verts = [nodes[0]]
    for i, j in zip(chain[:-1], chain[1:]):
        verts.extend(edges[(i, j)][1:])
    return Polyline(verts)


def interior_path(x, y) -> Polyline:
    """Vertical drop to the axis, along the axis, vertical rise."""
    return Polyline([x, (x[0], 0.0), (y[0], 0.0), y])


def _kind(domain: CombDomain, z) -> str:
    code = int(classify(domain, z[0], z[1]))
    if code == Region.INTERIOR:
        raise PreconditionError(f"endpoint {tuple(z)} lies inside the domain")
    if max(abs(z[0]), abs(z[1])) >= 1.0:
        return "outside"
    if z[0] < 0.0 or z[0] > 1.0:
        raise PreconditionError(f"endpoint {tuple(z)} is on the boundary but not in the tent")
    return "tent"


def connect(x, y, domain: CombDomain) -> tuple[Polyline, str]:
    """Complement curve from x to y by the three-case construction.

    Returns (polyline, case) with case in {"i", "ii", "iii"}.
    """
    x = (float(x[0]), float(x[1]))
    y = (float(y[0]), float(y[1]))
    kx, ky = _kind(domain, x), _kind(domain, y)
    if kx == "outside" and ky == "outside":
        return exterior_path(x, y), "i"
    if kx == "tent" and ky == "tent":
        return interior_path(x, y), "ii"
    if kx == "tent":
        return interior_path(x, WALL_POINT) + exterior_path(WALL_POINT, y), "iii"
    return (interior_path(y, WALL_POINT) + exterior_path(WALL_POINT, x)).reversed(), "iii"


# --- empirical constant ------------------------------------------------------------

STRATA = ("interior", "outside", "mixed")
STRATUM_WEIGHTS = (0.6, 0.2, 0.2)


@dataclass
class PairRecord:
    x: tuple[float, float]
    y: tuple[float, float]
    integral: float
    ratio: float
    case: str
    stratum: str


@dataclass
class CEstimate:
    value: float
    pair_count: int
    seed: int
    worst_pair: tuple[tuple[float, float], tuple[float, float]]
    worst_case: str = ""
    records: list[PairRecord] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "pair_count": self.pair_count,
            "seed": self.seed,
            "worst_pair": [list(self.worst_pair[0]), list(self.worst_pair[1])],
            "worst_case": self.worst_case,
            "label": "lower estimate of the pairwise sup over the three-case curve family",
        }


def _tent_point(rng: np.random.Generator, domain: CombDomain, x: float):
    d, _ = cantor_distance(x, domain.cantor)
    return (x, float(d) * rng.uniform(-1.0, 1.0))


def _outside_point(rng: np.random.Generator, box: float = 3.0):
    while True:
        z = rng.uniform(-box, box, size=2)
        if max(abs(z[0]), abs(z[1])) >= 1.0:
            return (float(z[0]), float(z[1]))


def sample_pair(domain: CombDomain, seed: int, index: int):
    """Deterministic pair number ``index``; independent of how many are drawn."""
    rng = np.random.default_rng([seed, index])
    stratum = STRATA[int(rng.choice(3, p=STRATUM_WEIGHTS))]
    if stratum == "interior":
        x1 = rng.uniform(0.0, 1.0)
        delta = 10.0 ** rng.uniform(-4.0, 0.0)
        x2 = x1 + delta if rng.uniform() < 0.5 else x1 - delta
        x2 = min(max(x2, 0.0), 1.0)
        if x2 == x1:
            x2 = 1.0 - x1
        return stratum, _tent_point(rng, domain, x1), _tent_point(rng, domain, x2)
    if stratum == "outside":
        a = _outside_point(rng)
        while True:
            r = 10.0 ** rng.uniform(-3.0, 0.7)
            t = rng.uniform(0.0, 2.0 * math.pi)
            b = (a[0] + r * math.cos(t), a[1] + r * math.sin(t))
            if max(abs(b[0]), abs(b[1])) >= 1.0:
                return stratum, a, b
    # mixed: tent point, outside point near the right wall
    x1 = 1.0 - 10.0 ** rng.uniform(-3.0, 0.0)
    a = _tent_point(rng, domain, x1)
    r = 10.0 ** rng.uniform(-3.0, 0.5)
    t = rng.uniform(-0.5 * math.pi, 0.5 * math.pi)
    b = (1.0 + r * math.cos(t), r * math.sin(t))
    return stratum, a, b


def pair_ratio(domain: CombDomain, p: float, x, y, tol: float = 1e-8):
    gamma, case = connect(x, y, domain)
    res = polyline_integral(gamma, p, domain, tol=tol)
    dist = math.dist(x, y)
    return res.value, res.value / dist ** (2.0 - p), case


def _evaluate(args):
    domain, p, seed, index, tol = args
    stratum, x, y = sample_pair(domain, seed, index)
    try:
        integral, ratio, case = pair_ratio(domain, p, x, y, tol)
    except (ConvergenceError, PreconditionError) as exc:
        raise type(exc)(f"pair {index} {x} -> {y}: {exc}") from exc
    return PairRecord(x, y, integral, ratio, case, stratum)


def estimate_C(domain: CombDomain, p: float, n_pairs: int, seed: int = 0, tol: float = 1e-8,
               workers: int = 1) -> CEstimate:
    """Max over sampled complement pairs of integral / |x - y|**(2-p)."""
    check_exponent(p)
    require_admissible(p, domain.lam)
    if n_pairs < 1:
        raise ValueError("n_pairs must be >= 1")
    jobs = [(domain, p, seed, i, tol) for i in range(n_pairs)]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_evaluate, jobs, chunksize=max(1, n_pairs // (4 * workers))))
    else:
        records = [_evaluate(job) for job in jobs]
    worst = max(range(n_pairs), key=lambda i: (records[i].ratio, -i))
    w = records[worst]
    return CEstimate(w.ratio, n_pairs, seed, (w.x, w.y), w.case, records)
