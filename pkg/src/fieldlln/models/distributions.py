"""Innovation laws sampled from counter-based words.

Every law here is symmetric about its mean, so the reflection
``x -> 2*mean - x`` is a measure-preserving map.  Replicate loops use it
for antithetic pairs.
"""

from dataclasses import dataclass

import numpy as np

from .. import rng

KINDS = ("rademacher", "uniform", "gaussian", "pareto", "point_mass")


@dataclass(frozen=True)
class InnovationDist:
    """One innovation law on R^m, components i.i.d.

    kind : one of ``rademacher``, ``uniform`` (a, b), ``gaussian`` (sigma),
        ``pareto`` (symmetric, tail index ``beta``, |x| >= 1),
        ``point_mass`` (c).
    """

    kind: str
    dim: int = 1
    a: float = -1.0
    b: float = 1.0
    sigma: float = 1.0
    beta: float = 2.0
    c: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown innovation kind {self.kind!r}")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.kind == "uniform" and not self.a < self.b:
            raise ValueError("uniform needs a < b")
        if self.kind == "gaussian" and self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if self.kind == "pareto" and self.beta <= 0:
            raise ValueError("pareto tail index must be positive")

    @classmethod
    def rademacher(cls, dim=1):
        return cls("rademacher", dim)

    @classmethod
    def uniform(cls, a, b, dim=1):
        return cls("uniform", dim, a=a, b=b)

    @classmethod
    def gaussian(cls, sigma=1.0, dim=1):
        return cls("gaussian", dim, sigma=sigma)

    @classmethod
    def pareto(cls, beta, dim=1):
        return cls("pareto", dim, beta=beta)

    @classmethod
    def point_mass(cls, c, dim=1):
        return cls("point_mass", dim, c=c)

    @property
    def mean(self):
        if self.kind == "uniform":
            return 0.5 * (self.a + self.b)
        if self.kind == "point_mass":
            return self.c
        if self.kind == "pareto" and self.beta <= 1:
            return float("nan")
        return 0.0

    @property
    def center(self):
        """Symmetry center (defined even when the mean is not)."""
        if self.kind == "uniform":
            return 0.5 * (self.a + self.b)
        if self.kind == "point_mass":
            return self.c
        return 0.0

    def moment_index(self):
        """Supremum of the exponents p with E|x|^p finite."""
        return self.beta if self.kind == "pareto" else float("inf")

    def from_hash(self, h):
        """Map site hashes (..., n) to samples (..., n, dim)."""
        out = np.empty(h.shape + (self.dim,), dtype=np.float64)
        for c in range(self.dim):
            w = rng.component_words(h, 2 * c)
            if self.kind == "rademacher":
                out[..., c] = np.where(w >> np.uint64(63), 1.0, -1.0)
            elif self.kind == "uniform":
                out[..., c] = self.a + (self.b - self.a) * rng.to_unit(w)
            elif self.kind == "gaussian":
                u1 = rng.to_unit(w)
                u2 = rng.to_unit(rng.component_words(h, 2 * c + 1))
                out[..., c] = self.sigma * np.sqrt(-2.0 * np.log(u1)) * np.cos(2 * np.pi * u2)
            elif self.kind == "pareto":
                sign = np.where(w >> np.uint64(63), 1.0, -1.0)
                # low 52 bits drive the magnitude, the top bit the sign
                u = ((w & np.uint64((1 << 52) - 1)).astype(np.float64) + 0.5) * 2.0**-52
                out[..., c] = sign * u ** (-1.0 / self.beta)
            else:
                out[..., c] = self.c
        return out

    def sample(self, keys, stream, coords):
        """(B, n, dim) innovations for keys (B,) at sites coords (n, k)."""
        return self.from_hash(rng.site_hash(keys, stream, coords))

    def reflect(self, x):
        return 2.0 * self.center - x

    def to_json(self):
        obj = {"kind": self.kind, "dim": self.dim}
        if self.kind == "uniform":
            obj.update(a=self.a, b=self.b)
        elif self.kind == "gaussian":
            obj["sigma"] = self.sigma
        elif self.kind == "pareto":
            obj["beta"] = self.beta
        elif self.kind == "point_mass":
            obj["c"] = self.c
        return obj

    @classmethod
    def from_json(cls, obj):
        obj = dict(obj)
        kind = obj.pop("kind")
        allowed = {"dim", "a", "b", "sigma", "beta", "c"}
        extra = set(obj) - allowed
        if extra:
            raise ValueError(f"unknown innovation parameters {sorted(extra)}")
        return cls(kind, **obj)
