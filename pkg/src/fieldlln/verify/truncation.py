"""Series of truncated variables: deterministic checks of five bounds.

For a point mass Y = y every left-hand side below is an explicit series
in y.  Both sides are linear in the law of Y, so the supremum of
LHS/RHS over point masses bounds the ratio for every law; discrete laws
can also be evaluated directly.

  B1: sum_{N>=1} 2^{Nd(1-r/p)} 1{y <= 2^{Nd/p}}       vs 1{y<=1} + y^{p-r} 1{y>1}
  B2: sum_{N>=1} 2^{-dN(1-1/p)} 1{y > 2^{dN/p}}        vs y^{p-1}
  B3: sum_{k>=1} 2^k k^{d-1} 1{y > eps 2^{k/p}}         vs phi_{p,d-1}(y)
  B4: sum_{k>=1} 2^{k(1-r/p)} k^{d-1} y^r 1{y <= 2^{k/p}} vs phi_{p,d-1}(y)
  B5: sum_{k>=1} 2^{k(1-1/p)} k^{d-1} y 1{y > 2^{k/p}}  vs phi_{p,d-1}(y)

Infinite tails are summed until a rigorous geometric bound on the
remainder falls below ``rtol`` times the partial sum; the bound is added,
so reported left-hand sides are upper bounds accurate to ``rtol``.
"""

import math
from dataclasses import dataclass

import numpy as np

from ..norms import phi

NAMES = ("B1", "B2", "B3", "B4", "B5")


def tail_series(a, e, k0, rtol=1e-12, max_terms=10_000_000):
    """sum_{k >= k0} a^k k^e for 0 < a < 1, k0 >= 1, with remainder bound.

    Returns (value including the bound, bound).  For j >= K the term ratio
    is at most rho_K = a (1 + 1/K)^e, so the remainder after K is at most
    t_K rho_K / (1 - rho_K) once rho_K < 1.
    """
    if not 0 < a < 1:
        raise ValueError(f"series diverges for ratio {a}")
    k = max(int(k0), 1)
    t = a ** k * k ** e
    total = t
    while True:
        rho = a * (1.0 + 1.0 / k) ** e
        if rho < 1:
            bound = t * rho / (1.0 - rho)
            if bound <= rtol * total or t == 0.0:
                return total + bound, bound
        k += 1
        if k - k0 > max_terms:
            raise RuntimeError("series truncation did not converge")
        t = a ** k * k ** e
        total += t


def _finite_sums(c, e, kmax):
    """Partial sums P[j] = sum_{k=1}^{j} c^k k^e for j = 0..kmax."""
    k = np.arange(1, kmax + 1, dtype=float)
    terms = np.exp(k * math.log(c)) * k ** e
    return np.concatenate([[0.0], np.cumsum(terms)])


def _count_below(y, step):
    """#{k >= 1 : 2^{k step} < y} computed against the same float thresholds."""
    y = np.asarray(y, dtype=float)
    out = np.zeros(y.shape, dtype=np.int64)
    pos = y > 1.0
    if np.any(pos):
        guess = np.floor(np.log2(y[pos]) / step).astype(np.int64) + 1
        guess = np.maximum(guess, 0)
        # repair rounding at the thresholds
        for _ in range(3):
            too_big = (guess >= 1) & ~(2.0 ** (guess * step) < y[pos])
            guess = np.where(too_big, guess - 1, guess)
            nxt = 2.0 ** ((guess + 1) * step) < y[pos]
            guess = np.where(nxt, guess + 1, guess)
        out[pos] = guess
    return out


def _tail_lookup(a, e, starts, rtol):
    cache = {}
    out = np.empty(len(starts))
    for idx, s in enumerate(starts):
        s = int(s)
        if s not in cache:
            cache[s] = tail_series(a, e, s, rtol)[0]
        out[idx] = cache[s]
    return out


def lhs(name, y, d, p, r, eps=1.0, rtol=1e-12):
    """Left-hand side of bound ``name`` at the point masses ``y``."""
    y = np.asarray(y, dtype=float)
    if name in ("B1", "B4") and not p < r:
        raise ValueError(f"{name} needs p < r (got p={p}, r={r})")
    if not p > 1:
        raise ValueError("p must exceed 1")
    if name == "B1":
        step = d / p
        # N counted from the first threshold with y <= 2^{N d/p}
        start = np.maximum(_count_below(y, step) + 1, 1)
        return _tail_lookup(2.0 ** (d * (1 - r / p)), 0.0, start, rtol)
    if name == "B2":
        step = d / p
        n = _count_below(y, step)
        P = _finite_sums(2.0 ** (-d * (1 - 1 / p)), 0.0, int(n.max(initial=0)))
        return P[n]
    if name == "B3":
        n = _count_below(np.asarray(y) / eps, 1.0 / p)
        P = _finite_sums(2.0, d - 1.0, int(n.max(initial=0)))
        return P[n]
    if name == "B4":
        start = np.maximum(_count_below(y, 1.0 / p) + 1, 1)
        tails = _tail_lookup(2.0 ** (1 - r / p), d - 1.0, start, rtol)
        return y ** r * tails
    if name == "B5":
        n = _count_below(y, 1.0 / p)
        P = _finite_sums(2.0 ** (1 - 1 / p), d - 1.0, int(n.max(initial=0)))
        return y * P[n]
    raise ValueError(f"unknown bound {name!r}")


def rhs(name, y, d, p, r):
    y = np.asarray(y, dtype=float)
    if name == "B1":
        with np.errstate(divide="ignore"):
            return np.where(y <= 1.0, 1.0, np.maximum(y, 1.0) ** (p - r))
    if name == "B2":
        return y ** (p - 1)
    return phi(p, d - 1.0, y)


def breakpoints(name, d, p, lo, hi):
    """Thresholds where the left-hand side jumps, inside [lo, hi]."""
    step = d / p if name in ("B1", "B2") else 1.0 / p
    kmax = int(math.ceil(math.log2(hi) / step)) + 1
    pts = 2.0 ** (np.arange(1, kmax + 1) * step)
    pts = pts[(pts >= lo) & (pts <= hi)]
    return np.unique(np.concatenate([pts, np.nextafter(pts, np.inf), np.nextafter(pts, -np.inf)]))


def make_grid(name, d, p, lo=1e-3, hi=1e6, points=2000):
    base = np.geomspace(lo, hi, points)
    extra = [1.0, np.nextafter(1.0, np.inf)] if lo <= 1.0 <= hi else []
    return np.unique(np.concatenate([base, breakpoints(name, d, p, lo, hi), extra]))


def ratio(l, rr):
    l = np.asarray(l, dtype=float)
    rr = np.asarray(rr, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(rr > 0, l / np.where(rr > 0, rr, 1.0), np.where(l > 0, np.inf, 0.0))
    return out


@dataclass(frozen=True)
class SeriesRow:
    name: str
    sup_ratio: float
    argsup: float
    sup_ratio_refined: float
    relative_change: float
    finite: bool
    stable: bool


def sup_ratio(name, grid, d, p, r, eps=1.0):
    rt = ratio(lhs(name, grid, d, p, r, eps), rhs(name, grid, d, p, r))
    j = int(np.argmax(rt))
    return float(rt[j]), float(grid[j])


def expectation_ratio(name, values, probs, d, p, r, eps=1.0):
    """LHS/RHS for a discrete law of Y (expectations on both sides)."""
    v = np.asarray(values, dtype=float)
    w = np.asarray(probs, dtype=float)
    if np.any(w < 0) or not math.isclose(float(w.sum()), 1.0, rel_tol=1e-9):
        raise ValueError("probabilities must be nonnegative and sum to 1")
    el = float(np.dot(w, lhs(name, v, d, p, r, eps)))
    er = float(np.dot(w, rhs(name, v, d, p, r)))
    return el, er, float(ratio(el, er))


def check_truncation_series(d, p, r, lo=1e-3, hi=1e6, points=2000, eps=1.0, tol=0.01):
    """Sup of LHS/RHS over a log grid and over its 2x refinement, per bound."""
    if not 1 < p < r:
        raise ValueError(f"need 1 < p < r, got p={p}, r={r}")
    rows = []
    for name in NAMES:
        s1, arg = sup_ratio(name, make_grid(name, d, p, lo, hi, points), d, p, r, eps)
        s2, _ = sup_ratio(name, make_grid(name, d, p, lo, hi, 2 * points), d, p, r, eps)
        change = abs(s2 - s1) / s1 if s1 > 0 else abs(s2 - s1)
        finite = bool(np.isfinite(s1) and np.isfinite(s2))
        rows.append(SeriesRow(name, s1, arg, s2, change, finite, finite and change < tol))
    return rows
