"""m-dependent approximation and stride-(2m+1) block decomposition.

For a field driven by lattice innovations, Y_{i,m} is the conditional
mean of X_i given the innovations in the sup-norm ball of radius m around
i, and X_{i,m} = Y_{i,m} - Y_{i,m-1}.  With Y_{i,-1} = E[X_i] the
components telescope to X_i - E[X_i] over m = 0..K.

Conditional means are replicate averages.  Each site gets its own
replicate innovations (indexed by the site and the integrated-out
location), and the same replicates serve Y_{i,m} and Y_{i,m-1}, so the
difference has small variance and the telescoping sum is exact.
"""

from dataclasses import dataclass
from itertools import product

import numpy as np

from .. import rng
from ..grid import Rect, as_index
from .fields import (
    LATTICE_STREAM, REPLICATE_STREAM, BernoulliField, FieldModel, IID, draw_innovations,
)

MDEP_SALT = 0x3DE9_0001


class ReplicateError(ValueError):
    """Replicate standard error above the caller's cap."""


def _as_bernoulli(model):
    if isinstance(model, (IID, BernoulliField)):
        return model.as_bernoulli()
    raise TypeError(f"m-dependent components need a lattice-driven field, got {model.kind}")


def _apply(bf, x, A):
    return A[0, 0] * x if bf.m == 1 else x @ A.T


def mdep_values(model, m_level, region, keys, replicates, seed=0, redraws=()):
    """Estimates of X_{i,m} on ``region`` for each key.

    Returns (mean, stderr), both shaped (B, *region.shape, m).
    """
    if m_level < 0:
        raise ValueError("m_level must be >= 0")
    if replicates < 1:
        raise ValueError("need at least one replicate")
    bf = _as_bernoulli(model)
    keys = np.asarray(keys, dtype=np.uint64).reshape(-1)
    B, K, m = len(keys), bf.window, bf.m
    out_shape = (B,) + region.shape + (m,)
    if m_level > K:
        return np.zeros(out_shape), np.zeros(out_shape)

    eps = draw_innovations(bf.dist, keys, LATTICE_STREAM, region.pad(K).points_array(), redraws)
    offs = bf.nonzero_offsets()
    radius = np.max(np.abs(offs), axis=1) if len(offs) else np.zeros(0, dtype=np.int64)
    lin_m = bf.linear_part(region, eps, offs[radius <= m_level])
    lin_m1 = bf.linear_part(region, eps, offs[radius <= m_level - 1])
    exact_top = m_level == K
    y_top = bf.link(lin_m) if exact_top else None

    outer = offs[radius >= m_level]
    strict = radius[radius >= m_level] > m_level
    W = len(outer)
    if W == 0:
        # nothing random is integrated out: both conditional means equal g(lin)
        return bf.link(lin_m) - bf.link(lin_m1), np.zeros(out_shape)

    pts = region.points_array()
    n = len(pts)
    coords = np.concatenate(
        [np.repeat(pts, W, axis=0), (pts[:, None, :] - outer[None]).reshape(-1, bf.d)], axis=1)
    mats = [bf.coefficient(k) for k in outer]

    npairs = replicates // 2
    n_groups = npairs + (replicates % 2)
    s1 = np.zeros(out_shape)
    s2 = np.zeros(out_shape)
    pair_acc = None
    for r in range(replicates):
        rk = rng.derive(keys, MDEP_SALT, seed, r // 2)
        rep = bf.dist.sample(rk, REPLICATE_STREAM, coords)
        if r % 2:
            rep = bf.dist.reflect(rep)
        rep = rep.reshape((B,) + region.shape + (W, m))
        add_all = np.zeros(out_shape)
        add_strict = np.zeros(out_shape)
        for w, A in enumerate(mats):
            c = _apply(bf, rep[..., w, :], A)
            add_all += c
            if strict[w]:
                add_strict += c
        y_m = y_top if exact_top else bf.link(lin_m + add_strict)
        diff = y_m - bf.link(lin_m1 + add_all)
        if r < 2 * npairs:
            if r % 2 == 0:
                pair_acc = diff
                continue
            g = 0.5 * (pair_acc + diff)
        else:
            g = diff
        s1 += g
        s2 += g * g
    mean = s1 / n_groups
    if n_groups > 1:
        var = np.maximum(s2 - n_groups * mean * mean, 0.0) / (n_groups - 1)
        se = np.sqrt(var / n_groups)
    else:
        se = np.full(out_shape, np.inf)
    return mean, se


def mdep_component(model, m_level, site, env_seed, replicates, seed=0, se_cap=None):
    """Estimate of X_{site, m_level} in the environment ``env_seed``.

    Returns (value, stderr) as length-m arrays.  Raises ReplicateError when
    ``se_cap`` is given and some component's stderr exceeds it.
    """
    site = as_index(site)
    region = Rect(site, site)
    mean, se = mdep_values(model, m_level, region, rng.as_key(env_seed), replicates, seed)
    mean = mean.reshape(-1)
    se = se.reshape(-1)
    if se_cap is not None and np.any(se > se_cap):
        raise ReplicateError(
            f"replicate stderr {float(np.max(se)):.3g} exceeds cap {se_cap}; raise the replicate count")
    return mean, se


@dataclass(frozen=True, eq=False)
class MDepApprox(FieldModel):
    """The field (X_{i,m})_i of m-dependent components of ``base``."""

    base: FieldModel
    m_level: int
    replicates: int = 64

    kind = "mdep"
    lattice_innovations = True

    def __post_init__(self):
        _as_bernoulli(self.base)
        if self.m_level < 0 or self.replicates < 1:
            raise ValueError("m_level must be >= 0 and replicates >= 1")

    @property
    def d(self):
        return self.base.d

    @property
    def m(self):
        return self.base.m

    @property
    def norm(self):
        return self.base.norm

    @property
    def window(self):
        return self.base.window

    def evaluate(self, region, keys, redraws=()):
        mean, _ = mdep_values(self.base, self.m_level, region, keys, self.replicates, 0, redraws)
        return mean

    def filtration_mask(self, j):
        return self.base.filtration_mask(j)

    def to_json(self):
        return {"kind": "mdep", "base": self.base.to_json(), "m_level": self.m_level,
                "replicates": self.replicates}


@dataclass(frozen=True)
class BlockClass:
    """Sites stride * j + offset for j in ``j_range`` (lower corner 0)."""

    offset: tuple
    stride: int
    j_range: Rect
    delta: tuple = ()

    def sites(self):
        j = self.j_range.points_array()
        return self.stride * j + np.asarray(self.offset, dtype=np.int64)


def block_decompose(region, m_level):
    """Congruence classes mod 2m+1 of a rectangle with lower corner 1.

    Class a holds the sites s*j + a with 0 <= j <= floor((n - a)/s); the
    upper bound equals floor(n/s) - delta with delta in {0,1}^d.  Every
    site of ``region`` lies in exactly one returned class; empty classes
    are omitted.
    """
    if any(lo != 1 for lo in region.lower):
        raise ValueError("block decomposition needs lower corner 1")
    if m_level < 0:
        raise ValueError("m_level must be >= 0")
    s = 2 * m_level + 1
    n = region.upper
    out = []
    for a in product(range(1, s + 1), repeat=region.d):
        if any(al > nl for al, nl in zip(a, n)):
            continue
        hi = tuple((nl - al) // s for al, nl in zip(a, n))
        delta = tuple(nl // s - h for nl, h in zip(n, hi))
        out.append(BlockClass(a, s, Rect((0,) * region.d, hi), delta))
    return out
