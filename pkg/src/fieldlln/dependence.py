"""Dependence diagnostics: coupling coefficients, projectors and the X^I split.

Conditional expectations are replicate averages.  Conditioning on a
sigma-field means: keep the innovations it contains, redraw the others.
Replicates come in antithetic pairs (the second member reflects the
redrawn innovations), and the same replicate keys are shared by all terms
of an inclusion-exclusion so that terms which must cancel do cancel.
"""

import csv
import warnings
from dataclasses import dataclass, field
from itertools import combinations, product

import numpy as np

from . import rng
from .grid import Rect, as_index, indicator, sub, zeros
from .models.fields import LATTICE_STREAM, DShift, Redraw, sup_ball_offsets
from .norms import NormSpec, bootstrap_stderr, norm_of

COUPLE_SALT = 0xC0_0001
INNER_SALT = 0xC0_0002
AXIS_SALT = 0xC0_0003


class NestedBiasWarning(UserWarning):
    """Inner replicate count small enough for visible nested Monte Carlo bias."""


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float
    samples: int


@dataclass(frozen=True)
class ProjectorEstimate:
    k: tuple
    norm_value: float
    stderr: float
    replicates: tuple


@dataclass
class DependenceProfile:
    """Map lag -> Estimate, ordered by insertion."""

    entries: dict = field(default_factory=dict)

    def rows(self):
        return [(k, e.value, e.stderr, e.samples) for k, e in self.entries.items()]

    def to_csv(self, path):
        write_profile_csv(path, self.rows())


def write_profile_csv(path, rows):
    """Rows of (k, estimate, stderr, replicates); k a tuple of coordinates."""
    rows = list(rows)
    d = len(rows[0][0]) if rows else 1
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"k{l + 1}" for l in range(d)] + ["estimate", "stderr", "replicates"])
        for k, val, se, reps in rows:
            reps = "x".join(str(r) for r in reps) if isinstance(reps, tuple) else reps
            w.writerow(list(k) + [repr(float(val)), repr(float(se)), reps])


def _path_keys(seed, n):
    return rng.derive(int(seed), np.arange(n))


def _norm_estimate(diffs_norm, spec, n_boot, seed):
    v = np.asarray(diffs_norm, dtype=float)
    if not np.any(v):
        return 0.0, 0.0
    val = norm_of(v, spec)
    se = bootstrap_stderr(v, lambda s: norm_of(s, spec), n_boot, seed)
    return val, se


def coupled_difference(model, i, keys, site=None):
    """X_i - X*_i where X* has the lattice innovation at ``site`` (default 0) redrawn."""
    if not model.lattice_innovations:
        raise TypeError(f"{model.kind} fields are not driven by lattice innovations")
    i = as_index(i)
    site = np.asarray(zeros(len(i)) if site is None else as_index(site), dtype=np.int64)

    def mask(stream, coords):
        if stream != LATTICE_STREAM:
            return None
        return np.all(coords == site, axis=1)

    region = Rect(i, i)
    x = model.evaluate(region, keys)
    xs = model.evaluate(region, keys, (Redraw(mask, rng.derive(keys, COUPLE_SALT)),))
    return (x - xs).reshape(len(keys), -1)


def delta_estimate(model, i, spec, n_pairs, seed, n_boot=200):
    """Norm of X_i - X*_i under ``spec`` with a bootstrap standard error."""
    keys = _path_keys(seed, n_pairs)
    diff = coupled_difference(model, i, keys)
    val, se = _norm_estimate(model.norm(diff), spec, n_boot, seed)
    return Estimate(val, se, n_pairs)


def delta_profile(model, lags, spec, n_pairs, seed, n_boot=200):
    """delta_estimate at each lag, with independent seeds per lag."""
    prof = DependenceProfile()
    for idx, k in enumerate(lags):
        k = as_index(k)
        prof.entries[k] = delta_estimate(model, k, spec, n_pairs, int(rng.derive(seed, idx)[0]), n_boot)
    return prof


def delta_axis_estimate(model, ell, lag, spec, n_pairs, seed, n_boot=200):
    """Coupling coefficient of the axis filter f_ell at ``lag``."""
    if not isinstance(model, DShift):
        raise TypeError("axis coupling coefficients need a DShift model")
    keys = _path_keys(seed, n_pairs)
    if lag < 0 or lag > model.axes[ell].lag:
        return Estimate(0.0, 0.0, n_pairs)

    def mask(stream, coords):
        if stream != ell + 1:
            return None
        return coords[:, 0] == 0

    f = model.axis_filter(ell, [lag], keys)
    fs = model.axis_filter(ell, [lag], keys, (Redraw(mask, rng.derive(keys, AXIS_SALT)),))
    val, se = _norm_estimate(np.abs(f - fs)[:, 0], spec, n_boot, seed)
    return Estimate(val, se, n_pairs)


def replicate_rows(env_keys, replicates, salt, antithetic=True):
    """(row keys, alternative keys, reflect flags) with env-major rows."""
    env_keys = np.asarray(env_keys, dtype=np.uint64).reshape(-1)
    r = np.tile(np.arange(replicates), len(env_keys))
    base = np.repeat(env_keys, replicates)
    if antithetic:
        return base, rng.derive(base, salt, r // 2), (r % 2 == 1)
    return base, rng.derive(base, salt, r), None


def group_stats(values, replicates, antithetic=True):
    """Means and standard errors over replicate groups.

    ``values`` is (E * R, ...) env-major; antithetic pairs are averaged
    first so the standard error reflects the pair means.
    """
    E = values.shape[0] // replicates
    v = values.reshape((E, replicates) + values.shape[1:])
    if antithetic and replicates >= 2:
        half = replicates // 2
        g = 0.5 * (v[:, 0:2 * half:2] + v[:, 1:2 * half:2])
        if replicates % 2:
            g = np.concatenate([g, v[:, -1:]], axis=1)
    else:
        g = v
    mean = g.mean(axis=1)
    n = g.shape[1]
    se = g.std(axis=1, ddof=1) / np.sqrt(n) if n > 1 else np.zeros_like(mean)
    return mean, se


def conditional_means(model, region, env_keys, masks, replicates, salt=INNER_SALT,
                      antithetic=True):
    """E[X | kept innovations] for each environment and each redraw mask.

    Returns (mean, stderr) shaped (E, len(masks), *region.shape, m).  All
    masks share the replicate keys.
    """
    base, alt, refl = replicate_rows(env_keys, replicates, salt, antithetic)
    means, ses = [], []
    for mask in masks:
        vals = model.evaluate(region, base, (Redraw(mask, alt, refl),))
        mu, se = group_stats(vals, replicates, antithetic)
        means.append(mu)
        ses.append(se)
    return np.stack(means, axis=1), np.stack(ses, axis=1)


def _warn_inner(R_inner):
    if R_inner < 100:
        warnings.warn(f"R_inner={R_inner} < 100: nested Monte Carlo bias of order 1/R_inner",
                      NestedBiasWarning, stacklevel=3)


def projector_samples(model, k, R_outer, R_inner, seed, site=None, chunk=64):
    """Outer sample of P_k(X_site) vectors, shaped (R_outer, m)."""
    k = as_index(k)
    d = len(k)
    site = zeros(d) if site is None else as_index(site)
    corners = [I for c in range(d + 1) for I in combinations(range(d), c)]
    signs = np.array([(-1) ** len(I) for I in corners], dtype=float)
    masks = [model.filtration_mask(sub(k, indicator(I, d))) for I in corners]
    region = Rect(site, site)
    env = _path_keys(seed, R_outer)
    out = []
    for s in range(0, R_outer, chunk):
        mu, _ = conditional_means(model, region, env[s:s + chunk], masks, R_inner)
        out.append(np.tensordot(signs, mu.reshape(mu.shape[0], len(corners), -1), axes=([0], [1])))
    return np.concatenate(out, axis=0)


def projector_norm(model, k, spec, R_outer, R_inner, seed, site=None, n_boot=200):
    """||P_k(X_site)|| under ``spec`` with a bootstrap standard error."""
    _warn_inner(R_inner)
    P = projector_samples(model, k, R_outer, R_inner, seed, site)
    val, se = _norm_estimate(model.norm(P), spec, n_boot, seed)
    return ProjectorEstimate(as_index(k), val, se, (R_outer, R_inner))


def hannan_sum(model, spec, window, R_outer, R_inner, seed, n_boot=200):
    """sum over ||k||_inf <= window of ||P_k(X_0)||, with the per-k table."""
    _warn_inner(R_inner)
    table = []
    total, var = 0.0, 0.0
    for idx, k in enumerate(sup_ball_offsets(window, model.d)):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NestedBiasWarning)
            est = projector_norm(model, tuple(int(c) for c in k), spec, R_outer, R_inner,
                                 int(rng.derive(seed, idx)[0]), n_boot=n_boot)
        table.append(est)
        total += est.norm_value
        var += est.stderr ** 2
    return total, np.sqrt(var), table


def xI_samples(model, I, R, seed, n_outer, salt=INNER_SALT):
    """Outer sample of X^I_0 vectors, shaped (n_outer, m)."""
    if not isinstance(model, DShift):
        raise TypeError("the X^I decomposition needs a DShift model")
    d = model.d
    I = tuple(sorted(I))
    if any(not 0 <= l < d for l in I):
        raise ValueError(f"axis subset {I} outside 0..{d - 1}")
    subsets = [J for c in range(len(I) + 1) for J in combinations(I, c)]
    signs = np.array([(-1) ** (len(I) + len(J)) for J in subsets], dtype=float)
    masks = [model.axes_complement_mask(J) for J in subsets]
    region = Rect(zeros(d), zeros(d))
    env = _path_keys(seed, n_outer)
    mu, _ = conditional_means(model, region, env, masks, R, salt)
    return np.tensordot(signs, mu.reshape(n_outer, len(subsets), -1), axes=([0], [1]))


def xI_component(model, I, R, seed, n_outer=200):
    """Sample of ||X^I_0|| over ``n_outer`` environments."""
    _warn_inner(R)
    return model.norm(xI_samples(model, I, R, seed, n_outer))


def xI_energy(model, I, R, seed, n_outer=200):
    """Unbiased estimate of E||X^I_0||^2 (euclidean) with its standard error.

    Two independent replicate halves give estimates A, B of X^I in each
    environment; <A, B> is unbiased for ||X^I||^2 because the inner noise
    of the halves is independent.  Returns (mean, stderr, L1 sample).
    """
    half = max(R // 2, 1)
    a = xI_samples(model, I, half, seed, n_outer, INNER_SALT)
    b = xI_samples(model, I, half, seed, n_outer, AXIS_SALT)
    t = np.sum(a * b, axis=1)
    se = float(np.std(t, ddof=1) / np.sqrt(len(t))) if len(t) > 1 else 0.0
    return float(np.mean(t)), se, model.norm(0.5 * (a + b))


@dataclass(frozen=True)
class D0Result:
    d0: int
    ambiguous: bool
    table: tuple  # (I, mean ||X^I||, energy estimate, energy stderr)


def detect_d0(model, R, seed, threshold_multiplier=3.0, n_outer=200):
    """Smallest |I| whose component X^I is detectably nonzero.

    A component counts as nonzero when its unbiased energy estimate
    exceeds ``threshold_multiplier`` standard errors.  Returns d with
    ``ambiguous`` set when nothing triggers at any cardinality, and sets
    ``ambiguous`` whenever an estimate lies in (1, threshold] standard
    errors.
    """
    _warn_inner(R)
    d = model.d
    table = []
    found, ambiguous, any_trigger = None, False, False
    idx = 0
    for c in range(1, d + 1):
        for I in combinations(range(d), c):
            energy, se, l1 = xI_energy(model, I, R, int(rng.derive(seed, idx)[0]), n_outer)
            idx += 1
            table.append((I, float(np.mean(l1)), energy, se))
            if energy > threshold_multiplier * se:
                any_trigger = True
                if found is None and c < d:
                    found = c
            elif energy > se:
                ambiguous = True
    if found is None:
        found = d
        if not any_trigger:
            ambiguous = True
    return D0Result(found, ambiguous, tuple(table))


@dataclass(frozen=True)
class ConditionalMeanCheck:
    axis: int
    mean: np.ndarray
    stderr: np.ndarray
    passed: bool


def orthomartingale_check(model, site, R_outer, R_inner, seed, z=4.0, antithetic=True,
                          atol=1e-12):
    """E[X_site | F_{site - e_l}] ~ 0 for every axis l.

    Each axis passes when every environment's replicate mean lies within
    ``z`` replicate standard errors (plus ``atol``) of zero.
    """
    site = as_index(site)
    d = len(site)
    env = _path_keys(seed, R_outer)
    region = Rect(site, site)
    out = []
    for ell in range(d):
        j = tuple(c - (1 if l == ell else 0) for l, c in enumerate(site))
        mu, se = conditional_means(model, region, env, [model.filtration_mask(j)], R_inner,
                                   antithetic=antithetic)
        mu = mu.reshape(R_outer, -1)
        se = se.reshape(R_outer, -1)
        scale = atol * max(1.0, float(np.max(np.abs(mu))))
        ok = bool(np.all(np.abs(mu) <= z * se + scale))
        out.append(ConditionalMeanCheck(ell, mu, se, ok))
    return out
