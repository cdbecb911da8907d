"""Lattice indices, rectangles and normalizations on Z^d."""

from dataclasses import dataclass
from itertools import combinations, product
import math

import numpy as np

_INT64_MAX = 2**63 - 1


def as_index(coords):
    """Return ``coords`` as a tuple of Python ints (a multi-index)."""
    if isinstance(coords, (int, np.integer)):
        return (int(coords),)
    idx = tuple(int(c) for c in coords)
    if not idx:
        raise ValueError("a multi-index needs at least one coordinate")
    return idx


def precedes(i, j):
    """Componentwise partial order: True iff i_l <= j_l for every l."""
    i, j = as_index(i), as_index(j)
    _same_dim(i, j)
    return all(a <= b for a, b in zip(i, j))


def ones(d):
    return (1,) * d


def zeros(d):
    return (0,) * d


def unit(ell, d):
    """Unit vector e_ell (0-based axis)."""
    return tuple(1 if k == ell else 0 for k in range(d))


def indicator(subset, d):
    """Indicator vector 1_I of a set of 0-based axes."""
    s = set(subset)
    return tuple(1 if k in s else 0 for k in range(d))


def add(i, j):
    _same_dim(i, j)
    return tuple(a + b for a, b in zip(i, j))


def sub(i, j):
    _same_dim(i, j)
    return tuple(a - b for a, b in zip(i, j))


def sup_norm(i):
    return max(abs(c) for c in i)


def _same_dim(i, j):
    if len(i) != len(j):
        raise ValueError(f"dimension mismatch: {len(i)} vs {len(j)}")


@dataclass(frozen=True)
class Rect:
    """Closed lattice rectangle ``{i : lower <= i <= upper}``."""

    lower: tuple
    upper: tuple

    def __post_init__(self):
        lo, up = as_index(self.lower), as_index(self.upper)
        _same_dim(lo, up)
        if not all(a <= b for a, b in zip(lo, up)):
            raise ValueError(f"empty rectangle: lower={lo} upper={up}")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", up)

    @classmethod
    def from_sides(cls, sides, lower=None):
        sides = as_index(sides)
        lower = ones(len(sides)) if lower is None else as_index(lower)
        return cls(lower, tuple(a + n - 1 for a, n in zip(lower, sides)))

    @classmethod
    def cube(cls, side, d):
        return cls.from_sides((side,) * d)

    @property
    def d(self):
        return len(self.lower)

    @property
    def shape(self):
        return tuple(b - a + 1 for a, b in zip(self.lower, self.upper))

    @property
    def volume(self):
        return volume(self)

    def contains(self, i):
        i = as_index(i)
        return precedes(self.lower, i) and precedes(i, self.upper)

    def contains_rect(self, other):
        return self.contains(other.lower) and self.contains(other.upper)

    def shift(self, t):
        return Rect(add(self.lower, t), add(self.upper, t))

    def pad(self, k):
        """Grow by ``k`` on every side (the innovation footprint of a window)."""
        return Rect(tuple(a - k for a in self.lower), tuple(b + k for b in self.upper))

    def points(self):
        """Iterate points in row-major order (last coordinate fastest)."""
        ranges = [range(a, b + 1) for a, b in zip(self.lower, self.upper)]
        return product(*ranges)

    def points_array(self):
        """(volume, d) int64 array of points, row-major."""
        grids = np.indices(self.shape, dtype=np.int64).reshape(self.d, -1).T
        return grids + np.asarray(self.lower, dtype=np.int64)

    def is_cube(self):
        return len(set(self.shape)) == 1


def volume(r):
    """Number of lattice points in ``r``; raises OverflowError past int64."""
    v = math.prod(r.shape)
    if v > _INT64_MAX:
        raise OverflowError(f"rectangle volume {v} exceeds int64 range")
    return v


def dyadic_upper(N):
    """Return (2^{N_l})_l for a nonnegative multi-index N."""
    N = as_index(N)
    if any(n < 0 for n in N):
        raise ValueError(f"dyadic exponents must be nonnegative, got {N}")
    if any(n >= 63 for n in N):
        raise OverflowError(f"2^N overflows int64 for N={N}")
    return tuple(1 << n for n in N)


def pi_normalizer(n, d0, p):
    """max over |I| = d0 of prod_{l in I} n_l^{1/p} * prod_{l not in I} n_l."""
    n = as_index(n)
    d = len(n)
    if not 0 <= d0 <= d:
        raise ValueError(f"d0 must lie in [0, {d}], got {d0}")
    if p <= 1:
        raise ValueError(f"p must exceed 1, got {p}")
    if any(x < 1 for x in n):
        raise ValueError(f"n must be >= 1 componentwise, got {n}")
    best = 0.0
    for subset in combinations(range(d), d0):
        val = 1.0
        for ell, x in enumerate(n):
            val *= float(x) ** (1.0 / p) if ell in subset else float(x)
        best = max(best, val)
    return best
