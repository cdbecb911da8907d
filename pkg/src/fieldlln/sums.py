"""Partial sums over rectangles via d-dimensional summed-area tables.

Integer-valued fields are accumulated in int64 and are exact.  Real
fields are accumulated per axis in blocks with a compensated carry
between blocks, so rounding stays near machine precision even for
axes of length 10^6.
"""

import csv
from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from .grid import Rect, as_index
from .space import EUCLIDEAN

BLOCK = 256


def _compensated_cumsum(x, axis):
    x = np.moveaxis(x, axis, 0)
    n = x.shape[0]
    if n <= BLOCK:
        return np.moveaxis(np.cumsum(x, axis=0), 0, axis)
    nb = -(-n // BLOCK)
    padded = np.zeros((nb * BLOCK,) + x.shape[1:])
    padded[:n] = x
    blocks = padded.reshape((nb, BLOCK) + x.shape[1:])
    within = np.cumsum(blocks, axis=1)
    totals = within[:, -1]
    offsets = np.empty_like(totals)
    s = np.zeros(x.shape[1:])
    c = np.zeros(x.shape[1:])
    for b in range(nb):
        offsets[b] = s + c
        # Neumaier two-sum keeps the lost low part in c
        t = s + totals[b]
        big = np.abs(s) >= np.abs(totals[b])
        c += np.where(big, (s - t) + totals[b], (totals[b] - t) + s)
        s = t
    out = (within + offsets[:, None]).reshape((nb * BLOCK,) + x.shape[1:])[:n]
    return np.moveaxis(out, 0, axis)


def prefix_array(values, axes):
    """Cumulative sums of ``values`` along ``axes`` (int64-exact on integers)."""
    values = np.asarray(values)
    if values.dtype.kind in "biu":
        out = values.astype(np.int64)
        for ax in axes:
            out = np.cumsum(out, axis=ax)
        return out
    out = values.astype(np.float64)
    for ax in axes:
        out = _compensated_cumsum(out, ax)
    return out


@dataclass(frozen=True, eq=False)
class PrefixTable:
    """S_n = sum_{1 <= i <= n} X_i for every n in ``region`` (lower corner 1).

    ``table`` has shape region.shape + (m,).
    """

    region: Rect
    table: np.ndarray
    norm: object = EUCLIDEAN

    @property
    def d(self):
        return self.region.d

    def at(self, n):
        n = as_index(n)
        return self.table[tuple(a - 1 for a in n)]

    def norms(self):
        return self.norm(self.table)


def build_prefix(tensor):
    """Summed-area table of a field tensor whose region starts at 1."""
    if any(lo != 1 for lo in tensor.region.lower):
        raise ValueError("prefix tables need a region with lower corner 1")
    d = tensor.region.d
    return PrefixTable(tensor.region, prefix_array(tensor.values, range(d)), tensor.norm)


def prefix_from_values(values, norm=EUCLIDEAN):
    """Prefix table of a raw array shaped (*sides, m) on the box starting at 1."""
    values = np.asarray(values)
    d = values.ndim - 1
    return PrefixTable(Rect.from_sides(values.shape[:-1]), prefix_array(values, range(d)), norm)


def rect_sum(prefix, r):
    """sum_{i in r} X_i by inclusion-exclusion over the 2^d corners."""
    if not prefix.region.contains_rect(r):
        raise ValueError(f"rectangle {r} outside the table region {prefix.region}")
    total = np.zeros(prefix.table.shape[-1], dtype=prefix.table.dtype)
    for corner in product((0, 1), repeat=r.d):
        idx, sign, skip = [], 1, False
        for ell, c in enumerate(corner):
            if c == 0:
                idx.append(r.upper[ell] - 1)
            else:
                if r.lower[ell] == 1:
                    skip = True
                    break
                idx.append(r.lower[ell] - 2)
                sign = -sign
        if not skip:
            total = total + sign * prefix.table[tuple(idx)]
    return total


def _levels(shape):
    d = len(shape)
    lev = np.zeros(shape, dtype=np.int64)
    for ell, s in enumerate(shape):
        ax = np.arange(1, s + 1, dtype=np.int64).reshape([s if k == ell else 1 for k in range(d)])
        lev = np.maximum(lev, ax)
    return lev


def max_normalized_rect(prefix, N, p):
    """|N|^{-1/p} max_{1 <= n <= N} ||S_n||."""
    N = as_index(N)
    if not prefix.region.contains(N):
        raise ValueError(f"N={N} outside the table region")
    sub = prefix.table[tuple(slice(0, a) for a in N)]
    vol = float(np.prod(np.asarray(N, dtype=float)))
    return float(np.max(prefix.norm(sub)) / vol ** (1.0 / p))


def normalizer_grid(shape, p, d0=None):
    """|n|^{1/p} (``d0`` None) or pi_{d0,p}(n) for every n in the box ``shape``."""
    d = len(shape)
    axes = [np.arange(1, s + 1, dtype=float).reshape([s if k == ell else 1 for k in range(d)])
            for ell, s in enumerate(shape)]
    if d0 is None:
        out = np.ones(shape)
        for ax in axes:
            out = out * ax ** (1.0 / p)
        return out
    best = np.zeros(shape)
    for subset in combinations(range(d), d0):
        val = np.ones(shape)
        for ell, ax in enumerate(axes):
            val = val * (ax ** (1.0 / p) if ell in subset else ax)
        best = np.maximum(best, val)
    return best


def level_profile(ratio):
    """Suffix maxima over levels: column N0 - 1 is max{ratio[n] : max n >= N0}.

    ``ratio`` has shape (B, *sides); returns (B, max side).
    """
    ratio = np.asarray(ratio, dtype=float)
    shape = ratio.shape[1:]
    lev = _levels(shape).reshape(-1)
    L = max(shape)
    B = ratio.shape[0]
    per_level = np.zeros((B, L))
    flat = ratio.reshape(B, -1)
    order = np.argsort(lev, kind="stable")
    bounds = np.searchsorted(lev[order], np.arange(1, L + 2))
    for l in range(L):
        sl = order[bounds[l]:bounds[l + 1]]
        if len(sl):
            per_level[:, l] = flat[:, sl].max(axis=1)
    return np.maximum.accumulate(per_level[:, ::-1], axis=1)[:, ::-1]


def sup_tail_profile_array(norms, p, d0=None):
    """Censored sup statistics for every N0 at once.

    ``norms`` holds ||S_n|| with shape (B, *sides).  Returns (B, max side)
    whose column N0 - 1 is sup{||S_n|| / |n|^{1/p} : max n >= N0}; with
    ``d0`` the normalization is pi_{d0,p}(n) instead.
    """
    norms = np.asarray(norms, dtype=float)
    return level_profile(norms / normalizer_grid(norms.shape[1:], p, d0))


def sup_tail_statistic(prefix, N0, p):
    """sup over n in the region with max n >= N0 of ||S_n|| / |n|^{1/p}.

    The supremum is censored at the region: sites beyond it are not seen.
    """
    L = max(prefix.region.shape)
    if not 1 <= N0 <= L:
        raise ValueError(f"N0 must lie in [1, {L}]")
    prof = sup_tail_profile_array(prefix.norms()[None], p)
    return float(prof[0, N0 - 1])


def square_trajectory_array(norms, p, d0=None):
    """Diagonal ||S_{n1}|| / n^{d/p} for norms shaped (B, side, ..., side).

    With ``d0`` the normalization is n^{d0/p + d - d0}.
    """
    norms = np.asarray(norms, dtype=float)
    d = norms.ndim - 1
    side = norms.shape[1]
    idx = np.arange(side)
    diag = norms[(slice(None),) + (idx,) * d]
    n = np.arange(1, side + 1, dtype=float)
    expo = d / p if d0 is None else d0 / p + d - d0
    return diag / n ** expo


def square_trajectory(prefix, p):
    """(n, ||S_{n1}|| / n^{d/p}) for n = 1..side on a cubic region."""
    if not prefix.region.is_cube():
        raise ValueError("square trajectory needs a cubic region")
    vals = square_trajectory_array(prefix.norms()[None], p)[0]
    return np.arange(1, len(vals) + 1), vals


def write_trajectory_csv(path, rows):
    """Rows of (path_id, n, value, censored)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["path_id", "n", "value", "censored"])
        for pid, n, val, cens in rows:
            w.writerow([int(pid), int(n), repr(float(val)), int(bool(cens))])
