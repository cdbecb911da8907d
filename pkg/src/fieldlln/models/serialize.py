"""JSON round trip for field models.

Each document carries a ``kind`` tag and the parameters of that kind.
Bernoulli fields accept either a full ``coeffs`` array or the shorthand
``geometric: {"d", "rho", "K"}`` for A_k = rho^{||k||_inf} Id.
"""

import numpy as np

from ..space import EUCLIDEAN, VecNorm
from .distributions import InnovationDist
from .fields import (
    IID, AxisFilter, AxisMDS, BernoulliField, DShift, ProductOM, geometric_coefficients,
)
from .links import Link
from .mdep import MDepApprox

MODEL_KINDS = ("iid", "product_om", "dshift", "bernoulli", "mdep")


def _check_keys(obj, allowed, where):
    extra = set(obj) - set(allowed)
    if extra:
        raise ValueError(f"{where}: unknown keys {sorted(extra)}")


def _norm(obj):
    return EUCLIDEAN if obj.get("norm") is None else VecNorm.from_json(obj["norm"])


def model_to_json(model):
    return model.to_json()


def model_from_json(obj):
    kind = obj.get("kind")
    if kind == "iid":
        _check_keys(obj, ("kind", "d", "dist", "norm", "scale"), "iid")
        return IID(InnovationDist.from_json(obj["dist"]), int(obj["d"]), _norm(obj),
                   float(obj.get("scale", 1.0)))
    if kind == "product_om":
        _check_keys(obj, ("kind", "axes", "norm"), "product_om")
        axes = []
        for ax in obj["axes"]:
            _check_keys(ax, ("dist", "scale", "arch"), "product_om axis")
            axes.append(AxisMDS(InnovationDist.from_json(ax["dist"]), float(ax.get("scale", 1.0)),
                                tuple(ax.get("arch", ()))))
        return ProductOM(tuple(axes), _norm(obj))
    if kind == "dshift":
        _check_keys(obj, ("kind", "axes", "link", "norm"), "dshift")
        axes = []
        for ax in obj["axes"]:
            _check_keys(ax, ("coeffs", "dist"), "dshift axis")
            dist = InnovationDist.from_json(ax["dist"]) if "dist" in ax else InnovationDist.rademacher()
            axes.append(AxisFilter(tuple(ax["coeffs"]), dist))
        link = Link.from_json(obj["link"]) if "link" in obj else Link("sum")
        return DShift(tuple(axes), link, _norm(obj))
    if kind == "bernoulli":
        _check_keys(obj, ("kind", "coeffs", "geometric", "geometric_rho", "dist", "link", "norm"),
                    "bernoulli")
        dist = InnovationDist.from_json(obj["dist"])
        link = Link.from_json(obj["link"]) if "link" in obj else Link()
        rho = obj.get("geometric_rho")
        if ("coeffs" in obj) == ("geometric" in obj):
            raise ValueError("bernoulli: give exactly one of 'coeffs' and 'geometric'")
        if "geometric" in obj:
            g = obj["geometric"]
            _check_keys(g, ("d", "rho", "K"), "bernoulli geometric")
            coeffs = geometric_coefficients(int(g["d"]), float(g["rho"]), int(g["K"]), dist.dim)
            rho = float(g["rho"])
        else:
            coeffs = np.asarray(obj["coeffs"], dtype=float)
        return BernoulliField(coeffs, dist, link, _norm(obj), rho)
    if kind == "mdep":
        _check_keys(obj, ("kind", "base", "m_level", "replicates"), "mdep")
        return MDepApprox(model_from_json(obj["base"]), int(obj["m_level"]),
                          int(obj.get("replicates", 64)))
    raise ValueError(f"unknown model kind {kind!r}")
