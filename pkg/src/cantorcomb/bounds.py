"""Closed-form dimension bounds for the curve condition and the matching sharpness calculus.

All logarithms are natural unless written log2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AdmissibilityError

LN2 = math.log(2.0)
# coefficient M2 / (4c) of the middle term of f_p
FP_COEFF = 2.0 / LN2


def _check_p(p: float) -> None:
    if not 1.0 < p < 2.0:
        raise ValueError(f"p must lie in (1, 2), got {p!r}")


@dataclass(frozen=True)
class BoundReport:
    p: float
    C: float
    rhs: float
    scaled_gap: float  # C * (2 - p - rhs)
    admissible: bool

    def to_dict(self) -> dict:
        return {"p": self.p, "C": self.C, "rhs": self.rhs,
                "scaled_gap": self.scaled_gap, "admissible": self.admissible}


def main_bound(p: float, C: float) -> BoundReport:
    """2 - p + log2(1 - (2**(p-1) - 1) / (2**(5-2p) C))."""
    _check_p(p)
    if C < 1.0:
        raise ValueError("C must be >= 1")
    frac = (2.0 ** (p - 1.0) - 1.0) / (2.0 ** (5.0 - 2.0 * p) * C)
    arg = 1.0 - frac
    if arg <= 0.0:  # cannot happen for C >= 1: the fraction is below 1/8 there
        return BoundReport(p, C, float("-inf"), float("inf"), False)
    rhs = 2.0 - p + math.log2(arg)
    # log1p keeps C * gap accurate when C is huge
    gap = -math.log1p(-frac) / LN2
    return BoundReport(p, C, rhs, C * gap, True)


def m1_floor(p: float) -> float:
    """Limit of C * (2 - p - main_bound(p, C)) as C grows."""
    _check_p(p)
    return (2.0 ** (p - 1.0) - 1.0) * 2.0 ** (2.0 * p - 5.0) / LN2


def lemma41_bound(p: float, lam: float, c: float = 9.0) -> float:
    """c / ((2-p) u (1-2u)) with u = lam**(2-p); needs 2u < 1."""
    _check_p(p)
    if c <= 0:
        raise ValueError("c must be positive")
    if not 0.0 < lam < 0.5:
        raise ValueError("lambda must lie in (0, 1/2)")
    u = lam ** (2.0 - p)
    if 2.0 * u >= 1.0:
        raise AdmissibilityError(p, lam)
    return c / ((2.0 - p) * u * (1.0 - 2.0 * u))


def f_p_eval(lam, p: float, coeff: float = FP_COEFF):
    """2 - p - coeff (2-p)(1 - 2 lam**(2-p)) + log 2 / log lam (vectorized in lam)."""
    lam = np.asarray(lam, dtype=float)
    if np.any((lam <= 0.0) | (lam >= 1.0)):
        raise ValueError("lambda must lie in (0, 1)")
    val = 2.0 - p - coeff * (2.0 - p) * (1.0 - 2.0 * lam ** (2.0 - p)) + LN2 / np.log(lam)
    return float(val) if val.ndim == 0 else val


def f_p_derivative(lam, p: float, coeff: float = FP_COEFF):
    """Analytic derivative of f_p in lam."""
    lam = np.asarray(lam, dtype=float)
    q = 2.0 - p
    val = 2.0 * coeff * q * q * lam ** (q - 1.0) - LN2 / (lam * np.log(lam) ** 2)
    return float(val) if val.ndim == 0 else val


def derivative_floor(p: float, coeff: float = FP_COEFF) -> float:
    """Lower bound on min f_p' over the sharp interval, in closed form.

    Equals (2-p)**2 / 2**((3-p)/(p-2)) * (coeff/2 - 1/log 2); it vanishes for the
    nominal coefficient 2/log 2 and turns negative below it.
    """
    _check_p(p)
    q = 2.0 - p
    return q * q / 2.0 ** ((3.0 - p) / (p - 2.0)) * (0.5 * coeff - 1.0 / LN2)


def c_threshold(p: float, c: float = 9.0) -> float:
    """c / ((2-p) 2**(p-3) (1 - 2**(p-2)))."""
    _check_p(p)
    if c <= 0:
        raise ValueError("c must be positive")
    return c / ((2.0 - p) * 2.0 ** (p - 3.0) * (1.0 - 2.0 ** (p - 2.0)))


def sharp_interval(p: float) -> tuple[float, float]:
    """[lam_lo, lam_hi) = [2**(1/(p-2)) / 2, 2**(1/(p-2)))."""
    _check_p(p)
    hi = 2.0 ** (1.0 / (p - 2.0))
    return 0.5 * hi, hi


class NoRootError(ValueError):
    pass


def lambda_for_C(p: float, C: float, c: float = 9.0, rtol: float = 1e-13) -> float:
    """Solve lemma41_bound(p, lam, c) = C for lam in the sharp interval by bisection.

    On that interval u = lam**(2-p) exceeds 1/4, where u (1 - 2u) decreases,
    so the bound increases strictly in lam and the bracket holds one root.
    """
    lo, hi = sharp_interval(p)
    floor = c_threshold(p, c)
    if C < floor * (1.0 - 1e-12):
        raise NoRootError(f"C={C!r} is below the threshold {floor!r}")
    if C <= floor:
        return lo

    def g(lam):
        return lemma41_bound(p, lam, c) - C

    # the bound blows up at hi; step back until the bracket is finite and positive
    top = hi
    for k in range(1, 200):
        top = hi - (hi - lo) * 2.0 ** -k
        if g(top) > 0:
            break
    else:
        raise NoRootError("could not bracket the root below the interval end")
    # near the pole the bound is steep, so keep bisecting past rtol down to
    # adjacent floats when needed and return the endpoint with the smaller residual
    a, b = lo, top
    while True:
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        if g(mid) > 0:
            b = mid
        else:
            a = mid
        if b - a <= rtol * b and min(abs(g(a)), abs(g(b))) <= 1e-12 * C:
            break
    return a if abs(g(a)) <= abs(g(b)) else b


def exact_dimension(lam: float) -> float:
    return LN2 / -math.log(lam)


@dataclass
class SharpnessReport:
    p: float
    c: float
    C_threshold: float
    lam_interval: tuple[float, float]
    coeff: float
    M2: float
    f_max: float
    endpoint_value: float
    min_fd_derivative: float
    min_analytic_derivative: float
    derivative_floor: float
    C_grid: list[float] = field(default_factory=list)
    lam_C: list[float] = field(default_factory=list)
    exact_dim: list[float] = field(default_factory=list)
    target: list[float] = field(default_factory=list)
    checks: dict = field(default_factory=dict)
    violations: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return {
            "p": self.p, "c": self.c, "C_threshold": self.C_threshold,
            "lam_interval": list(self.lam_interval), "coeff": self.coeff, "M2": self.M2,
            "log_convention": "natural",
            "f_max": self.f_max, "endpoint_value": self.endpoint_value,
            "min_fd_derivative": self.min_fd_derivative,
            "min_analytic_derivative": self.min_analytic_derivative,
            "derivative_floor": self.derivative_floor,
            "C_grid": self.C_grid, "lam_C": self.lam_C, "exact_dim": self.exact_dim,
            "target": self.target, "checks": dict(self.checks),
            "violations": dict(self.violations), "passed": self.passed,
        }


def verify_sharpness(p: float, c: float = 9.0, grid_size: int = 1000,
                     coeff: float = FP_COEFF, n_C: int = 40) -> SharpnessReport:
    """Finite-grid check of the sharpness inequalities.

    (a) f_p <= 1e-12 on the grid, (b) f_p vanishes at the right end,
    (c) forward differences of f_p are >= -1e-9, (d) for C above the
    threshold, log 2 / -log lam_C >= 2 - p - M2 / C, (e) the closed-form
    lower bound on f_p' (``derivative_floor``) is nonnegative, and (f) the
    exact derivative is nonnegative on the grid. ``coeff`` replaces 2 / log 2
    in f_p and fixes M2 = 4 c coeff, which is how the perturbed negative
    control is run.
    """
    _check_p(p)
    lo, hi = sharp_interval(p)
    grid = lo + (hi - lo) * np.arange(grid_size) / grid_size  # half-open at hi
    f = f_p_eval(grid, p, coeff)
    # forward differences over the grid plus the last step up to hi
    f_all = np.append(f, f_p_eval(hi, p, coeff))
    nodes = np.append(grid, hi)
    fd = np.diff(f_all) / np.diff(nodes)
    deriv = f_p_derivative(nodes, p, coeff)
    end = f_p_eval(hi, p, coeff)

    M2 = 4.0 * c * coeff
    floor = c_threshold(p, c)
    C_grid = floor * np.logspace(0.0, 4.0, n_C)
    lam_C = [lambda_for_C(p, float(C), c) for C in C_grid]
    dims = [exact_dimension(lc) for lc in lam_C]
    target = [2.0 - p - M2 / float(C) for C in C_grid]
    margins = np.array(dims) - np.array(target)

    rep = SharpnessReport(
        p, c, floor, (lo, hi), coeff, M2,
        f_max=float(f.max()), endpoint_value=float(end),
        min_fd_derivative=float(fd.min()), min_analytic_derivative=float(deriv.min()),
        derivative_floor=derivative_floor(p, coeff),
        C_grid=[float(x) for x in C_grid], lam_C=lam_C, exact_dim=dims, target=target)
    rep.checks = {
        "a_nonpositive": bool(f.max() <= 1e-12),
        "b_endpoint_zero": bool(abs(end) <= 1e-12),
        "c_fd_monotone": bool(fd.min() >= -1e-9),
        "d_dimension": bool(margins.min() >= -1e-12),
        "e_derivative_floor": bool(rep.derivative_floor >= -1e-12),
        "f_exact_derivative": bool(deriv.min() >= -1e-9),
    }
    if not rep.checks["a_nonpositive"]:
        rep.violations["a_nonpositive"] = float(grid[int(np.argmax(f))])
    if not rep.checks["c_fd_monotone"]:
        rep.violations["c_fd_monotone"] = float(nodes[int(np.argmin(fd))])
    if not rep.checks["d_dimension"]:
        rep.violations["d_dimension"] = float(C_grid[int(np.argmin(margins))])
    if not rep.checks["e_derivative_floor"]:
        rep.violations["e_derivative_floor"] = rep.derivative_floor
    if not rep.checks["f_exact_derivative"]:
        rep.violations["f_exact_derivative"] = float(nodes[int(np.argmin(deriv))])
    return rep
