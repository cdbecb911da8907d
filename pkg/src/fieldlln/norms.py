"""Norms of scalar samples ||X||: L^p, Orlicz phi_{p,q} (Luxemburg) and weak L^p.

All functions treat the sample as an empirical distribution with equal
weights, so the values are exact for that distribution.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq


@dataclass(frozen=True)
class NormSpec:
    """Which norm to apply: ``lp`` (p), ``orlicz`` (p, q) or ``weak`` (p)."""

    kind: str = "lp"
    p: float = 2.0
    q: float = 0.0

    def __post_init__(self):
        if self.kind not in ("lp", "orlicz", "weak"):
            raise ValueError(f"unknown norm kind {self.kind!r}")
        if self.kind == "lp" and self.p < 1:
            raise ValueError("lp needs p >= 1")
        if self.kind == "orlicz" and self.p < 1:
            raise ValueError("orlicz needs p >= 1")
        if self.kind == "weak" and self.p <= 1:
            raise ValueError("weak L^p needs p > 1")
        if self.q < 0:
            raise ValueError("q must be >= 0")

    @classmethod
    def lp(cls, p):
        return cls("lp", p)

    @classmethod
    def orlicz(cls, p, q):
        return cls("orlicz", p, q)

    @classmethod
    def weak(cls, p):
        return cls("weak", p)

    def to_json(self):
        obj = {"kind": self.kind, "p": self.p}
        if self.kind == "orlicz":
            obj["q"] = self.q
        return obj

    @classmethod
    def from_json(cls, obj):
        return cls(obj["kind"], float(obj["p"]), float(obj.get("q", 0.0)))


def as_sample(values):
    """Validate a sample of nonnegative finite reals; returns a flat float array."""
    v = np.asarray(values, dtype=float).reshape(-1)
    if v.size == 0:
        raise ValueError("empty sample")
    if not np.all(np.isfinite(v)) or np.any(v < 0):
        raise ValueError("sample values must be finite and nonnegative")
    return v


def phi(p, q, t):
    """phi_{p,q}(t) = t^p (1 + 1{t >= 1} ln t)^q."""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore"):
        log_part = np.where(t >= 1.0, np.log(np.maximum(t, 1.0)), 0.0)
    out = t ** p
    if q != 0:
        out = out * (1.0 + log_part) ** q
    return out


def lp_norm(values, p):
    v = as_sample(values)
    if p == 1:
        return float(np.mean(v))
    top = np.max(v)
    if top == 0:
        return 0.0
    # scale by the maximum to avoid overflow for large p
    return float(top * np.mean((v / top) ** p) ** (1.0 / p))


def luxemburg_norm(values, p, q, rtol=1e-12):
    """inf{lam > 0 : mean phi_{p,q}(v / lam) <= 1}, solved by bracketed root finding."""
    v = as_sample(values)
    v = v[v > 0]
    n_total = np.asarray(values).size
    if v.size == 0:
        return 0.0
    if q == 0:
        return lp_norm(np.concatenate([v, np.zeros(n_total - v.size)]), p)

    def excess(lam):
        return np.sum(phi(p, q, v / lam)) / n_total - 1.0

    top = float(np.max(v))
    lo = top / (2.0 * n_total) ** (1.0 / p)
    while excess(lo) <= 0:
        lo *= 0.5
    hi = top
    while excess(hi) > 0:
        hi *= 2.0
    if excess(hi) == 0:
        return hi
    return float(brentq(excess, lo, hi, xtol=1e-300, rtol=rtol, maxiter=500))


def weak_lp_norm(values, p):
    """sup over events A of P(A)^{-1+1/p} E[v 1_A], via top-k level sets."""
    v = np.sort(as_sample(values))[::-1]
    n = v.size
    k = np.arange(1, n + 1)
    partial = np.cumsum(v) / n
    return float(np.max((k / n) ** (-1.0 + 1.0 / p) * partial))


def weak_tail_quasinorm(values, p):
    """t* = sup_t t P(v > t)^{1/p}; on an empirical sample max_k v_(k) (k/n)^{1/p}."""
    v = np.sort(as_sample(values))[::-1]
    n = v.size
    k = np.arange(1, n + 1)
    return float(np.max(v * (k / n) ** (1.0 / p)))


def weak_comparison_constants(p):
    """(c, c') with c t* <= ||v||_{p,w} <= c' t* on every distribution."""
    return 1.0, p / (p - 1.0)


def lpq_moment(values, p, q):
    """Empirical mean of v^p log(1 + v)^q."""
    v = as_sample(values)
    out = v ** p
    if q != 0:
        out = out * np.log1p(v) ** q
    return float(np.mean(out))


def norm_of(values, spec):
    if spec.kind == "lp":
        return lp_norm(values, spec.p)
    if spec.kind == "orlicz":
        return luxemburg_norm(values, spec.p, spec.q)
    return weak_lp_norm(values, spec.p)


def bootstrap_stderr(values, fn, n_boot=200, seed=0):
    """Nonparametric bootstrap standard error of ``fn`` over a sample."""
    v = np.asarray(values, dtype=float).reshape(-1)
    if v.size < 2 or np.all(v == v[0]):
        return 0.0
    gen = np.random.default_rng(seed)
    idx = gen.integers(0, v.size, size=(n_boot, v.size))
    stats = np.array([fn(v[row]) for row in idx])
    return float(np.std(stats, ddof=1))


def norm_with_stderr(values, spec, n_boot=200, seed=0):
    val = norm_of(values, spec)
    return val, bootstrap_stderr(values, lambda s: norm_of(s, spec), n_boot, seed)
