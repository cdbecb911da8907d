"""Random-field generators.

A model turns innovations into field values.  Innovations are drawn from
the counter-based generator, one stream per innovation family: stream 0
holds the i.i.d. field (eps_u, u in Z^d); stream ``l + 1`` holds the
one-dimensional sequence attached to axis ``l`` for axis-built models.

Conditioning and coupling are expressed as :class:`Redraw` rules that
replace a subset of the innovations with draws from other keys.
"""

from dataclasses import dataclass, field
from itertools import product
from typing import Callable

import numpy as np

from .. import rng
from ..grid import Rect, as_index
from ..space import EUCLIDEAN, VecNorm
from .distributions import InnovationDist
from .links import Link

LATTICE_STREAM = 0
REPLICATE_STREAM = 1 << 20


@dataclass(frozen=True, eq=False)
class Redraw:
    """Replace the innovations selected by ``mask(stream, coords)``.

    ``keys`` has one entry per batch row; ``reflect`` (optional, bool per
    row) applies the symmetry reflection, giving antithetic partners.
    """

    mask: Callable
    keys: np.ndarray
    reflect: np.ndarray | None = None


def draw_innovations(dist, keys, stream, coords, redraws=()):
    vals = dist.sample(keys, stream, coords)
    for rd in redraws:
        mask = rd.mask(stream, coords)
        if mask is None or not np.any(mask):
            continue
        alt = dist.sample(rd.keys, stream, coords[mask])
        if rd.reflect is not None and np.any(rd.reflect):
            alt[rd.reflect] = dist.reflect(alt[rd.reflect])
        vals[:, mask] = alt
    return vals


def sup_ball_offsets(K, d):
    """All k in Z^d with ||k||_inf <= K, row-major."""
    return np.array(list(product(range(-K, K + 1), repeat=d)), dtype=np.int64).reshape(-1, d)


class FieldModel:
    """Base class.  Subclasses set ``d``, ``m``, ``norm`` and ``window``."""

    kind = "abstract"
    lattice_innovations = False

    def innovation_requests(self, region):
        raise NotImplementedError

    def assemble(self, region, innovations):
        raise NotImplementedError

    def evaluate(self, region, keys, redraws=()):
        """Field values on ``region`` for every key: (B, *region.shape, m)."""
        keys = np.asarray(keys, dtype=np.uint64).reshape(-1)
        innov = {}
        for stream, dist, coords in self.innovation_requests(region):
            innov[stream] = draw_innovations(dist, keys, stream, coords, redraws)
        return self.assemble(region, innov)

    def filtration_mask(self, j):
        """Mask selecting innovations NOT measurable w.r.t. F_j."""
        raise NotImplementedError

    @property
    def smoothness(self):
        return self.norm.smoothness

    def to_json(self):
        raise NotImplementedError


def _quadrant_complement(j):
    j = np.asarray(j, dtype=np.int64)

    def mask(stream, coords):
        if stream != LATTICE_STREAM:
            return None
        return ~np.all(coords <= j, axis=1)

    return mask


def _axis_future(j):
    j = tuple(j)

    def mask(stream, coords):
        ell = stream - 1
        if not 0 <= ell < len(j):
            return None
        return coords[:, 0] > j[ell]

    return mask


@dataclass(frozen=True, eq=False)
class IID(FieldModel):
    """X_i = scale * eps_i with eps i.i.d. on Z^d."""

    dist: InnovationDist
    d: int
    norm: VecNorm = EUCLIDEAN
    scale: float = 1.0

    kind = "iid"
    lattice_innovations = True

    @property
    def m(self):
        return self.dist.dim

    @property
    def window(self):
        return 0

    def innovation_requests(self, region):
        return [(LATTICE_STREAM, self.dist, region.points_array())]

    def assemble(self, region, innovations):
        vals = innovations[LATTICE_STREAM]
        out = vals.reshape((vals.shape[0],) + region.shape + (self.m,))
        return out * self.scale if self.scale != 1.0 else out

    def filtration_mask(self, j):
        return _quadrant_complement(j)

    def as_bernoulli(self):
        coeffs = np.zeros((1,) * self.d + (self.m, self.m))
        coeffs[(0,) * self.d] = np.eye(self.m)
        return BernoulliField(coeffs, self.dist, Link(scale=self.scale), self.norm)

    def to_json(self):
        obj = {"kind": "iid", "d": self.d, "dist": self.dist.to_json(), "norm": self.norm.to_json()}
        if self.scale != 1.0:
            obj["scale"] = self.scale
        return obj


@dataclass(frozen=True, eq=False)
class BernoulliField(FieldModel):
    """X_i = g(sum_{||k||_inf <= K} A_k eps_{i-k}).

    ``coeffs`` has shape (2K+1,)*d + (m, m); index K along each axis is
    the lag 0.
    """

    coeffs: np.ndarray
    dist: InnovationDist
    link: Link = field(default_factory=Link)
    norm: VecNorm = EUCLIDEAN
    geometric_rho: float | None = None

    kind = "bernoulli"
    lattice_innovations = True

    def __post_init__(self):
        A = np.asarray(self.coeffs, dtype=float)
        if A.ndim < 3 or A.shape[-1] != A.shape[-2]:
            raise ValueError("coeffs must have shape (2K+1,)*d + (m, m)")
        side = A.shape[0]
        if side % 2 == 0 or any(s != side for s in A.shape[:-2]):
            raise ValueError("coefficient window must be a centered cube of odd side")
        if A.shape[-1] != self.dist.dim:
            raise ValueError("innovation dimension must match the coefficient matrices")
        if self.link.reducing:
            raise ValueError(f"link {self.link.kind!r} is not componentwise")
        A.setflags(write=False)
        object.__setattr__(self, "coeffs", A)

    @property
    def d(self):
        return self.coeffs.ndim - 2

    @property
    def m(self):
        return self.coeffs.shape[-1]

    @property
    def window(self):
        return (self.coeffs.shape[0] - 1) // 2

    K = window

    def coefficient(self, k):
        """A_k for a lag k (zero matrix outside the window)."""
        k = as_index(k)
        if max(abs(c) for c in k) > self.window:
            return np.zeros((self.m, self.m))
        return self.coeffs[tuple(c + self.window for c in k)]

    def nonzero_offsets(self):
        offs = sup_ball_offsets(self.window, self.d)
        keep = [np.any(self.coefficient(k)) for k in offs]
        return offs[np.asarray(keep, dtype=bool)]

    def innovation_requests(self, region):
        return [(LATTICE_STREAM, self.dist, region.pad(self.window).points_array())]

    def linear_part(self, region, padded_innov, offsets=None):
        """sum over ``offsets`` of A_k eps_{i-k} from padded innovations."""
        K = self.window
        shape = region.shape
        B = padded_innov.shape[0]
        E = padded_innov.reshape((B,) + tuple(s + 2 * K for s in shape) + (self.m,))
        lin = np.zeros((B,) + shape + (self.m,))
        if offsets is None:
            offsets = self.nonzero_offsets()
        for k in offsets:
            A = self.coefficient(k)
            if not np.any(A):
                continue
            sl = (slice(None),) + tuple(slice(K - c, K - c + s) for c, s in zip(k, shape))
            if self.m == 1:
                lin += A[0, 0] * E[sl]
            else:
                lin += E[sl] @ A.T
        return lin

    def assemble(self, region, innovations):
        return self.link(self.linear_part(region, innovations[LATTICE_STREAM]))

    def filtration_mask(self, j):
        return _quadrant_complement(j)

    def as_bernoulli(self):
        return self

    def tail_mass(self, exponent):
        """sum_{||k|| > K} ||A_k||^exponent for the untruncated geometric field."""
        if self.geometric_rho is None:
            return 0.0
        return geometric_tail_mass(self.d, self.geometric_rho, self.window, exponent)

    def to_json(self):
        obj = {
            "kind": "bernoulli",
            "coeffs": self.coeffs.tolist(),
            "dist": self.dist.to_json(),
            "link": self.link.to_json(),
            "norm": self.norm.to_json(),
        }
        if self.geometric_rho is not None:
            obj["geometric_rho"] = self.geometric_rho
        return obj


def geometric_coefficients(d, rho, K, m=1):
    """A_k = rho^{||k||_inf} Id on the window ||k||_inf <= K."""
    side = 2 * K + 1
    coeffs = np.zeros((side,) * d + (m, m))
    for k in sup_ball_offsets(K, d):
        coeffs[tuple(k + K)] = rho ** int(np.max(np.abs(k))) * np.eye(m)
    return coeffs


def geometric_linear_field(d, rho, K, dist=None, link=None, norm=EUCLIDEAN):
    dist = InnovationDist.rademacher() if dist is None else dist
    return BernoulliField(
        geometric_coefficients(d, rho, K, dist.dim), dist,
        Link() if link is None else link, norm, geometric_rho=rho,
    )


def geometric_tail_mass(d, rho, K, exponent, tol=1e-15):
    """sum_{k > K} #{||i||_inf = k} * rho^(k * exponent)."""
    total, k = 0.0, K + 1
    while True:
        shell = (2 * k + 1) ** d - (2 * k - 1) ** d
        term = shell * abs(rho) ** (k * exponent)
        total += term
        if term <= tol * max(total, 1e-300) or k > K + 100_000:
            return total
        k += 1


@dataclass(frozen=True)
class AxisMDS:
    """One-dimensional martingale differences d_j = sigma_j * xi_j.

    sigma_j = scale * sqrt(1 + sum_u arch[u-1] * ||xi_{j-u}||^2) depends
    only on the past, so centering of xi makes (d_j) a martingale
    difference sequence.
    """

    dist: InnovationDist
    scale: float = 1.0
    arch: tuple = ()

    def __post_init__(self):
        mu = self.dist.mean
        if not np.isfinite(mu) or mu != 0.0:
            raise ValueError(f"axis innovations must be centered and integrable, mean={mu}")
        if any(a < 0 for a in self.arch):
            raise ValueError("ARCH coefficients must be nonnegative")
        object.__setattr__(self, "arch", tuple(float(a) for a in self.arch))

    @property
    def lag(self):
        return len(self.arch)

    def values(self, xi):
        """xi: (B, W + n, dim) innovations -> (B, n, dim) differences."""
        W = self.lag
        n = xi.shape[1] - W
        cur = xi[:, W:]
        if W == 0:
            return self.scale * cur
        sq = np.sum(xi * xi, axis=-1)
        var = np.ones(cur.shape[:2])
        for u, a in enumerate(self.arch, start=1):
            var += a * sq[:, W - u:W - u + n]
        return self.scale * np.sqrt(var)[..., None] * cur

    def to_json(self):
        obj = {"dist": self.dist.to_json()}
        if self.scale != 1.0:
            obj["scale"] = self.scale
        if self.arch:
            obj["arch"] = list(self.arch)
        return obj


@dataclass(frozen=True, eq=False)
class ProductOM(FieldModel):
    """D_i = d^(1)_{i_1} * ... * d^(d)_{i_d} with independent axis sequences.

    The first axis may be vector valued; the others must be scalar.
    """

    axes: tuple
    norm: VecNorm = EUCLIDEAN

    kind = "product_om"

    def __post_init__(self):
        axes = tuple(self.axes)
        if not axes:
            raise ValueError("need at least one axis")
        if any(ax.dist.dim != 1 for ax in axes[1:]):
            raise ValueError("only the first axis may be vector valued")
        object.__setattr__(self, "axes", axes)

    @property
    def d(self):
        return len(self.axes)

    @property
    def m(self):
        return self.axes[0].dist.dim

    @property
    def window(self):
        return max(ax.lag for ax in self.axes)

    def innovation_requests(self, region):
        reqs = []
        for ell, ax in enumerate(self.axes):
            lo, up = region.lower[ell] - ax.lag, region.upper[ell]
            coords = np.arange(lo, up + 1, dtype=np.int64)[:, None]
            reqs.append((ell + 1, ax.dist, coords))
        return reqs

    def assemble(self, region, innovations):
        d = self.d
        out = None
        for ell, ax in enumerate(self.axes):
            vals = ax.values(innovations[ell + 1])  # (B, n_ell, dim)
            shape = [vals.shape[0]] + [1] * d + [vals.shape[-1]]
            shape[ell + 1] = vals.shape[1]
            vals = vals.reshape(shape)
            out = vals if out is None else out * vals
        return np.broadcast_to(out, (out.shape[0],) + region.shape + (self.m,)).copy()

    def filtration_mask(self, j):
        return _axis_future(j)

    def to_json(self):
        return {"kind": "product_om", "axes": [ax.to_json() for ax in self.axes],
                "norm": self.norm.to_json()}


@dataclass(frozen=True)
class AxisFilter:
    """Causal linear filter f(j) = sum_{u=0}^{K} a_u eps_{j-u} on one axis."""

    coeffs: tuple
    dist: InnovationDist = field(default_factory=InnovationDist.rademacher)

    def __post_init__(self):
        c = tuple(float(a) for a in self.coeffs)
        if not c:
            raise ValueError("filter needs at least one coefficient")
        if self.dist.dim != 1:
            raise ValueError("axis innovations must be scalar")
        object.__setattr__(self, "coeffs", c)

    @property
    def lag(self):
        return len(self.coeffs) - 1

    def values(self, eps):
        """eps: (B, K + n, 1) -> (B, n)."""
        K = self.lag
        n = eps.shape[1] - K
        e = eps[..., 0]
        out = np.zeros((e.shape[0], n))
        for u, a in enumerate(self.coeffs):
            if a != 0.0:
                out += a * e[:, K - u:K - u + n]
        return out

    def to_json(self):
        return {"coeffs": list(self.coeffs), "dist": self.dist.to_json()}


@dataclass(frozen=True, eq=False)
class DShift(FieldModel):
    """X_i = g(f_1(eps^(1)_{i_1 - .}), ..., f_d(eps^(d)_{i_d - .}))."""

    axes: tuple
    link: Link = field(default_factory=lambda: Link("sum"))
    norm: VecNorm = EUCLIDEAN

    kind = "dshift"

    def __post_init__(self):
        axes = tuple(self.axes)
        if not axes:
            raise ValueError("need at least one axis")
        if not (self.link.reducing or self.link.kind == "identity"):
            raise ValueError(f"link {self.link.kind!r} cannot combine axis values")
        object.__setattr__(self, "axes", axes)

    @property
    def d(self):
        return len(self.axes)

    @property
    def m(self):
        return self.link.out_dim(self.d)

    @property
    def window(self):
        return max(ax.lag for ax in self.axes)

    def axis_coords(self, ell, lo, up):
        return np.arange(lo - self.axes[ell].lag, up + 1, dtype=np.int64)[:, None]

    def innovation_requests(self, region):
        return [(ell + 1, ax.dist, self.axis_coords(ell, region.lower[ell], region.upper[ell]))
                for ell, ax in enumerate(self.axes)]

    def assemble(self, region, innovations):
        d = self.d
        B = next(iter(innovations.values())).shape[0]
        grid = np.empty((B,) + region.shape + (d,))
        for ell, ax in enumerate(self.axes):
            f = ax.values(innovations[ell + 1])
            shape = [B] + [1] * d
            shape[ell + 1] = f.shape[1]
            grid[..., ell] = f.reshape(shape)
        return self.link(grid)

    def axis_filter(self, ell, indices, keys, redraws=()):
        """f_ell at the given integer indices: (B, len(indices))."""
        indices = np.asarray(indices, dtype=np.int64)
        lo, up = int(indices.min()), int(indices.max())
        ax = self.axes[ell]
        coords = self.axis_coords(ell, lo, up)
        eps = draw_innovations(ax.dist, np.asarray(keys, dtype=np.uint64), ell + 1, coords, redraws)
        return ax.values(eps)[:, indices - lo]

    def filtration_mask(self, j):
        return _axis_future(j)

    def axes_complement_mask(self, J):
        """Mask redrawing every axis outside J (conditioning on G_J)."""
        J = frozenset(J)

        def mask(stream, coords):
            if (stream - 1) in J:
                return None
            return np.ones(len(coords), dtype=bool)

        return mask

    def to_json(self):
        return {"kind": "dshift", "axes": [ax.to_json() for ax in self.axes],
                "link": self.link.to_json(), "norm": self.norm.to_json()}


def replicate_redraw(mask, keys, replicates, salt):
    """Redraw for ``replicates`` antithetic replicates of each key.

    Returns (row_keys, Redraw) with B * replicates rows ordered key-major.
    """
    keys = np.asarray(keys, dtype=np.uint64).reshape(-1)
    r = np.arange(replicates)
    base = np.repeat(keys, replicates)
    alt = rng.derive(base, salt, np.tile(r // 2, len(keys)))
    reflect = np.tile(r % 2 == 1, len(keys))
    return base, Redraw(mask, alt, reflect)


def replicate_groups(values, replicates):
    """Collapse (B*R, ...) replicate values into antithetic group means.

    Returns (mean over replicates, stderr) each shaped (B, ...).
    """
    B = values.shape[0] // replicates
    v = values.reshape((B, replicates) + values.shape[1:])
    npairs = replicates // 2
    groups = []
    if npairs:
        groups.append(0.5 * (v[:, 0:2 * npairs:2] + v[:, 1:2 * npairs:2]))
    if replicates % 2:
        groups.append(v[:, -1:])
    g = np.concatenate(groups, axis=1)
    mean = g.mean(axis=1)
    ng = g.shape[1]
    if ng > 1:
        se = g.std(axis=1, ddof=1) / np.sqrt(ng)
    else:
        se = np.where(np.all(v == v[:, :1], axis=1), 0.0, np.inf)
    return mean, se
