"""Closed-form bounds and fixed points used as measurement targets.

Natural logarithms throughout unless the name says ``log2``.  Bound
calculators work in log space and return a :class:`BoundResult` carrying the
raw log-value next to the value clipped to its meaningful range.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConvergenceError

_BISECT_CAP = 400


@dataclass(frozen=True)
class SurvivalQuery:
    delta: float
    tol: float = 1e-12

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")


@dataclass(frozen=True)
class BoundResult:
    value: float
    log_value: float
    formula_id: str
    raw: float

    def __float__(self):
        return self.value


def _bisect(f, lo, hi, tol, cap=_BISECT_CAP):
    flo = f(lo)
    for _ in range(cap):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if abs(fm) <= tol and hi - lo <= 2 * tol:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo <= 1e-17:
            return 0.5 * (lo + hi)
    raise ConvergenceError(f"bisection did not reach tol={tol} in {cap} steps")


def survival_probability(q: SurvivalQuery | float, tol: float = 1e-12) -> float:
    """Survival probability of a Poisson(1 + delta) Galton-Watson process.

    The positive root of ``g = 1 - exp(-(1 + delta) g)``, found by bisection on
    ``[tol, 1 - tol]``; zero when ``delta <= 0``.
    """
    if not isinstance(q, SurvivalQuery):
        q = SurvivalQuery(float(q), tol)
    if q.delta <= 0:
        return 0.0
    lam = 1.0 + q.delta

    def f(g):
        return -math.expm1(-lam * g) - g

    lo = min(q.tol, 0.25 * q.delta)
    if f(lo) <= 0:
        lo = 1e-300
    hi = 1.0 - min(q.tol, 1e-15)
    return _bisect(f, lo, hi, q.tol)


def chernoff_deviation(N: int, p: float, a: float) -> BoundResult:
    """Two-sided tail bound P(|Bin(N,p) - Np| > a) < 2 exp(-a^2 / (4Np))."""
    mean = N * p
    if not a > 0:
        raise ValueError("a must be positive")
    if a > mean / 2:
        raise ValueError(f"a={a} exceeds Np/2={mean / 2}")
    log_v = math.log(2.0) - a * a / (4.0 * mean)
    raw = math.exp(log_v)
    return BoundResult(min(raw, 1.0), log_v, "chernoff-deviation", raw)


def chernoff_upper(N: int, p: float, b: float) -> BoundResult:
    """Upper-tail bound P(Bin(N,p) > bNp) <= (e/b)^(bNp)."""
    if not b > 0:
        raise ValueError("b must be positive")
    expo = b * N * p
    log_v = expo * (1.0 - math.log(b))
    raw = math.exp(log_v) if log_v < 700 else math.inf
    return BoundResult(min(raw, 1.0), log_v, "chernoff-upper", raw)


def harper_bound(a_size: int, d: int) -> float:
    """Edge-isoperimetric lower bound |A| (d - log2 |A|) for |A| <= 2^(d-1)."""
    if not 1 <= a_size <= 1 << (d - 1):
        raise ValueError(f"|A|={a_size} outside [1, 2^{d - 1}]")
    return a_size * (d - math.log2(a_size))


def binary_entropy(x: float) -> float:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x={x} outside [0, 1]")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def inverse_binary_entropy(y: float, tol: float = 1e-12) -> float:
    """The unique x in [0, 1/2] with h(x) = y."""
    if not 0.0 <= y <= 1.0:
        raise ValueError(f"y={y} outside [0, 1]")
    if y == 0.0:
        return 0.0
    if y == 1.0:
        return 0.5
    lo, hi = 0.0, 0.5
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if binary_entropy(mid) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def log_tree_count_bound(max_degree: int, k: int) -> float:
    if max_degree < 1 or k < 1:
        raise ValueError("need max_degree >= 1 and k >= 1")
    if k == 1:
        return 0.0
    first = (k - 2) * math.log(k) + (k - 1) * math.log(max_degree) - math.lgamma(k)
    second = (k - 1) * (1.0 + math.log(max_degree))
    return min(first, second)


def tree_count_bound(max_degree: int, k: int) -> float:
    """Bound on rooted k-vertex subtrees at a vertex of a max-degree graph."""
    return math.exp(log_tree_count_bound(max_degree, k))


def b_of_s(s: float, d: int) -> float:
    """Isoperimetric deficiency 1 - log2(s)/d."""
    if not 1 <= s <= 2.0 ** d:
        raise ValueError(f"s={s} outside [1, 2^{d}]")
    return 1.0 - math.log2(s) / d


def piece_radius(s: float, d: int, c8: float) -> float:
    """Piece-diameter bound 2 d / (c8 b(s))."""
    return 2.0 * d / (c8 * b_of_s(s, d))


def growth_schedule(d: int, c7: float, c8: float, start_size: float, target_size: float,
                    max_rounds: int = 10_000_000) -> tuple[int, float]:
    """Iterate x <- x (1 + c7 b(x)) from ``start_size`` until ``target_size``.

    Each round adds ``piece_radius(x) + 5`` to the radius.  Returns the
    number of rounds and the accumulated radius.
    """
    if c7 <= 0 or c8 <= 0:
        raise ValueError("constants must be positive")
    if not 1 <= start_size <= target_size < 2.0 ** d:
        raise ValueError("need 1 <= start <= target < 2^d")
    x = float(start_size)
    rounds = 0
    radius = 0.0
    while x < target_size:
        if rounds >= max_rounds:
            raise ConvergenceError("growth schedule exceeded round cap")
        radius += piece_radius(x, d, c8) + 5.0
        x = x * (1.0 + c7 * b_of_s(x, d))
        rounds += 1
    return rounds, radius
