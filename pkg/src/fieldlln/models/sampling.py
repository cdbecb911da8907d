"""Realized fields: sampling, coupled resampling and tensor export."""

import hashlib
import json
import os
import struct
from dataclasses import dataclass

import numpy as np

from .. import rng
from ..grid import Rect, as_index, volume
from ..space import VecNorm
from .fields import LATTICE_STREAM, AxisMDS, ProductOM, Redraw

RESAMPLE_SALT = 0x5EED_0001
DEFAULT_MAX_BYTES = 2 << 30
MAX_BYTES_ENV = "FIELDLLN_MAX_BYTES"
_MAGIC = b"FTNS"


class MemoryBudgetError(MemoryError):
    """Raised before allocating a region larger than the memory budget."""

    def __init__(self, required, cap):
        super().__init__(f"region needs {required} bytes, budget is {cap} bytes "
                         f"(set {MAX_BYTES_ENV} to raise it)")
        self.required = required
        self.cap = cap


def memory_cap():
    raw = os.environ.get(MAX_BYTES_ENV)
    return int(raw) if raw else DEFAULT_MAX_BYTES


def required_bytes(model, region, batch=1):
    """Peak bytes for evaluating ``model`` on ``region`` for ``batch`` keys.

    Counts the padded innovation block, the field values and one working
    copy, all float64.
    """
    pad = volume(region.pad(model.window)) if model.lattice_innovations else volume(region)
    return 8 * batch * model.m * (pad + 2 * volume(region)) + 8 * batch * model.d * volume(region)


def check_budget(model, region, batch=1, cap=None):
    cap = memory_cap() if cap is None else cap
    need = required_bytes(model, region, batch)
    if need > cap:
        raise MemoryBudgetError(need, cap)
    return need


def model_id(model):
    blob = json.dumps(model.to_json(), sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


@dataclass(frozen=True, eq=False)
class FieldTensor:
    """Field values on a rectangle: ``values`` has shape region.shape + (m,)."""

    region: Rect
    values: np.ndarray
    norm: VecNorm
    model_id: str = ""
    seed: int = 0

    @property
    def m(self):
        return self.values.shape[-1]

    def at(self, i):
        i = as_index(i)
        return self.values[tuple(a - lo for a, lo in zip(i, self.region.lower))]

    def norms(self):
        return self.norm(self.values)

    def to_bytes(self):
        """Header (magic, d, m, lower, upper) then little-endian float64, row-major."""
        d = self.region.d
        head = _MAGIC + struct.pack("<II", d, self.m)
        head += struct.pack(f"<{d}q", *self.region.lower) + struct.pack(f"<{d}q", *self.region.upper)
        return head + np.ascontiguousarray(self.values, dtype="<f8").tobytes()

    @classmethod
    def from_bytes(cls, blob, norm=None):
        if blob[:4] != _MAGIC:
            raise ValueError("not a field tensor blob")
        d, m = struct.unpack_from("<II", blob, 4)
        off = 12
        lower = struct.unpack_from(f"<{d}q", blob, off)
        upper = struct.unpack_from(f"<{d}q", blob, off + 8 * d)
        off += 16 * d
        region = Rect(lower, upper)
        vals = np.frombuffer(blob, dtype="<f8", offset=off).reshape(region.shape + (m,))
        return cls(region, vals.astype(np.float64), norm or VecNorm())

    def to_csv(self, path, max_points=100_000):
        """One row per site: coordinates then components."""
        if self.region.volume > max_points:
            raise ValueError(f"CSV export limited to {max_points} sites")
        d, m = self.region.d, self.m
        cols = [f"i{l + 1}" for l in range(d)] + [f"x{c + 1}" for c in range(m)]
        pts = self.region.points_array()
        flat = self.values.reshape(-1, m)
        with open(path, "w") as fh:
            fh.write(",".join(cols) + "\n")
            for p, v in zip(pts, flat):
                fh.write(",".join([str(int(a)) for a in p] + [repr(float(x)) for x in v]) + "\n")


def _key(seed):
    return rng.as_key(seed)


def sample_field(model, region, seed):
    """Realize ``model`` on ``region``; a pure function of (model, region, seed)."""
    check_budget(model, region)
    vals = model.evaluate(region, _key(seed))[0]
    return FieldTensor(region, vals, model.norm, model_id(model), int(seed))


def site_redraw(site, seed):
    """Redraw rule replacing the lattice innovation at ``site`` only."""
    site = np.asarray(as_index(site), dtype=np.int64)

    def mask(stream, coords):
        if stream != LATTICE_STREAM:
            return None
        return np.all(coords == site, axis=1)

    keys = rng.derive(_key(seed), RESAMPLE_SALT)
    return Redraw(mask, keys)


def resample_at(model, region, seed, site):
    """``sample_field`` with the innovation at ``site`` redrawn independently.

    Only defined for models driven by a lattice innovation field; axis-built
    models expose :func:`resample_axis_at` instead.
    """
    if not model.lattice_innovations:
        raise TypeError(f"{model.kind} fields have no lattice innovations; use resample_axis_at")
    site = as_index(site)
    if len(site) != region.d:
        raise ValueError("site dimension mismatch")
    if not region.pad(model.window).contains(site):
        raise ValueError(f"site {site} outside the innovation region {region.pad(model.window)}")
    check_budget(model, region)
    vals = model.evaluate(region, _key(seed), (site_redraw(site, seed),))[0]
    return FieldTensor(region, vals, model.norm, model_id(model), int(seed))


def resample_axis_at(model, region, seed, axis, index):
    """Redraw the innovation ``index`` of axis ``axis`` (axis-built models)."""
    if model.lattice_innovations:
        raise TypeError("use resample_at for lattice-driven models")

    def mask(stream, coords):
        if stream != axis + 1:
            return None
        return coords[:, 0] == index

    rd = Redraw(mask, rng.derive(_key(seed), RESAMPLE_SALT, axis))
    vals = model.evaluate(region, _key(seed), (rd,))[0]
    return FieldTensor(region, vals, model.norm, model_id(model), int(seed))


def orthomartingale_from_products(axis_specs, norm=None):
    """Product of independent one-dimensional martingale differences.

    ``axis_specs`` holds :class:`AxisMDS` objects or (dist, scale, arch)
    tuples.  Raises ValueError for non-centered axes.
    """
    axes = []
    for spec in axis_specs:
        if isinstance(spec, AxisMDS):
            axes.append(spec)
        elif isinstance(spec, tuple):
            axes.append(AxisMDS(*spec))
        else:
            axes.append(AxisMDS(spec))
    return ProductOM(tuple(axes)) if norm is None else ProductOM(tuple(axes), norm)
