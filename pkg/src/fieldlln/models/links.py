"""Hölder-continuous output maps g applied after the linear/axis filters."""

from dataclasses import dataclass

import numpy as np

# maps R^k -> R^k componentwise (used by Bernoulli fields)
COMPONENTWISE = ("identity", "tanh", "clamp", "power")
# maps R^d -> R (used by functions of d independent shifts)
REDUCING = ("sum", "product", "tanh_product", "power_sum")


@dataclass(frozen=True)
class Link:
    kind: str = "identity"
    alpha: float = 1.0
    bound: float = 1.0
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in COMPONENTWISE + REDUCING:
            raise ValueError(f"unknown link {self.kind!r}")
        if not 0 < self.alpha <= 1:
            raise ValueError(f"Hölder exponent must lie in (0, 1], got {self.alpha}")
        if self.bound <= 0:
            raise ValueError("clamp bound must be positive")

    @property
    def reducing(self):
        return self.kind in REDUCING

    def out_dim(self, in_dim):
        return 1 if self.reducing else in_dim

    def holder(self, m=1, s=None):
        """(alpha, constant) with ||g(x)-g(y)|| <= C ||x-y||^alpha.

        For reducing links the bound is in the form C * sum_l |x_l - y_l|^alpha.
        ``constant`` is None when g is not globally Hölder.
        """
        c = abs(self.scale)
        if self.kind == "product":
            return 1.0, None
        if self.kind in ("power", "power_sum"):
            k = 2.0 ** (1.0 - self.alpha)
            if self.kind == "power":
                k *= m ** ((1.0 - self.alpha) / (2.0 if s is None else s))
            return self.alpha, c * k
        if self.kind == "clamp" and m > 1 and s not in (None, 2):
            return 1.0, 2.0 * c
        return 1.0, c

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        k = self.kind
        if k == "identity":
            y = x
        elif k == "tanh":
            y = np.tanh(x)
        elif k == "clamp":
            if x.shape[-1] == 1:
                y = np.clip(x, -self.bound, self.bound)
            else:
                r = np.sqrt(np.sum(x * x, axis=-1, keepdims=True))
                with np.errstate(divide="ignore", invalid="ignore"):
                    f = np.where(r > self.bound, self.bound / r, 1.0)
                y = x * f
        elif k == "power":
            y = np.sign(x) * np.abs(x) ** self.alpha
        elif k == "sum":
            y = np.sum(x, axis=-1, keepdims=True)
        elif k == "product":
            y = np.prod(x, axis=-1, keepdims=True)
        elif k == "tanh_product":
            y = np.prod(np.tanh(x), axis=-1, keepdims=True)
        else:  # power_sum
            y = np.sum(np.sign(x) * np.abs(x) ** self.alpha, axis=-1, keepdims=True)
        return y * self.scale if self.scale != 1.0 else y

    def to_json(self):
        obj = {"kind": self.kind}
        if self.kind in ("power", "power_sum"):
            obj["alpha"] = self.alpha
        if self.kind == "clamp":
            obj["bound"] = self.bound
        if self.scale != 1.0:
            obj["scale"] = self.scale
        return obj

    @classmethod
    def from_json(cls, obj):
        obj = dict(obj)
        extra = set(obj) - {"kind", "alpha", "bound", "scale"}
        if extra:
            raise ValueError(f"unknown link parameters {sorted(extra)}")
        return cls(**obj)
