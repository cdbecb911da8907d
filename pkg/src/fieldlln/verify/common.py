"""Shared machinery for experiments: path batches, summaries and verdicts."""

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .. import rng
from ..models.distributions import InnovationDist
from ..models.fields import IID, BernoulliField, DShift, ProductOM
from ..models.mdep import MDepApprox
from ..models.sampling import memory_cap, required_bytes

CHUNK = 25
DECAY_RATIO = 0.5
DECAY_SLOPE = -0.2
NO_DECAY_SLOPE = -0.05
NO_GROWTH_SLOPE = 0.05


def path_keys(master, start, stop):
    return rng.derive(int(master), np.arange(start, stop))


def chunk_size(model, region, cap=None):
    """Paths per batch: CHUNK, reduced to fit the memory budget.

    Depends only on the model, region and budget, so results never depend
    on the worker count.
    """
    cap = memory_cap() if cap is None else cap
    per_path = 3 * required_bytes(model, region)
    return max(1, min(CHUNK, cap // max(per_path, 1)))


def map_paths(fn, n_paths, workers=1, chunk=CHUNK):
    """Apply ``fn(start, stop)`` to consecutive path ranges and concatenate.

    Ranges are fixed by ``chunk`` and results are joined in ascending path
    order, so the output is independent of ``workers``.
    """
    ranges = [(s, min(s + chunk, n_paths)) for s in range(0, n_paths, chunk)]
    if not ranges:
        return None
    if workers <= 1 or len(ranges) == 1:
        parts = [fn(a, b) for a, b in ranges]
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(lambda r: fn(*r), ranges))
    if isinstance(parts[0], tuple):
        return tuple(np.concatenate([p[k] for p in parts], axis=0) for k in range(len(parts[0])))
    return np.concatenate(parts, axis=0)


def loglog_slope(x, y):
    """OLS slope of log y on log x; None when some y is not positive."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 2 or np.any(~np.isfinite(y)) or np.any(y <= 0):
        return None
    lx, ly = np.log(x), np.log(y)
    lx = lx - lx.mean()
    return float(np.dot(lx, ly - ly.mean()) / np.dot(lx, lx))


@dataclass(frozen=True)
class Verdict:
    name: str
    passed: bool
    value: float | None = None
    threshold: float | None = None
    detail: str = ""


def decay_verdicts(horizons, medians, expect, thresholds=None):
    """Decay / no-decay verdicts on a median sequence.

    ``expect`` is ``decay``, ``no_decay`` or ``none``.  An identically zero
    sequence is reported as degenerate and passes.
    """
    t = {"ratio": DECAY_RATIO, "slope": DECAY_SLOPE, "no_decay_slope": NO_DECAY_SLOPE}
    t.update(thresholds or {})
    med = np.asarray(medians, dtype=float)
    slope = loglog_slope(horizons, med)
    if np.all(med == 0):
        return slope, None, [Verdict("degenerate_zero", True, 0.0, None, "identically zero statistic")]
    ratio = float(med[-1] / med[0]) if med[0] > 0 else None
    out = []
    decays = slope is not None and ratio is not None and ratio < t["ratio"] and slope < t["slope"]
    if expect == "decay":
        out.append(Verdict("median_ratio", ratio is not None and ratio < t["ratio"], ratio, t["ratio"]))
        out.append(Verdict("loglog_slope", slope is not None and slope < t["slope"], slope, t["slope"]))
    elif expect == "no_decay":
        out.append(Verdict("no_decay_slope", slope is None or slope > t["no_decay_slope"], slope,
                           t["no_decay_slope"]))
    else:
        out.append(Verdict("decay_observed", True, float(decays), None, "descriptive only"))
    return slope, ratio, out


def no_growth_verdict(name, scales, ratios, threshold=NO_GROWTH_SLOPE):
    r = np.asarray(ratios, dtype=float)
    if np.all(r == 0) or np.any(~np.isfinite(r)):
        return None, Verdict(name, True, None, threshold, "degenerate ratio")
    slope = loglog_slope(scales, r)
    return slope, Verdict(name, slope is not None and slope <= threshold, slope, threshold)


def quantile_rows(horizons, values):
    """Per-horizon median, 90% quantile and mean of a (paths, len(horizons)) array."""
    rows = []
    for j, N in enumerate(horizons):
        col = values[:, j]
        rows.append({"N": N, "median": float(np.median(col)), "q90": float(np.quantile(col, 0.9)),
                     "mean": float(np.mean(col))})
    return rows


def innovation_dists(model):
    if isinstance(model, (IID, BernoulliField)):
        return [model.dist]
    if isinstance(model, (ProductOM, DShift)):
        return [ax.dist for ax in model.axes]
    if isinstance(model, MDepApprox):
        return innovation_dists(model.base)
    return []


def hypothesis_violations(model, p):
    """Reasons why a run with exponent p breaks the moment or smoothness hypotheses."""
    out = []
    r = model.norm.smoothness
    if p >= r:
        out.append(f"p={p} >= smoothness r={r}")
    for dist in innovation_dists(model):
        if isinstance(dist, InnovationDist) and dist.kind == "pareto" and dist.beta <= p:
            out.append(f"pareto tail index {dist.beta} <= p={p}")
    return out


def clean(obj):
    """JSON-ready copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, Verdict):
        return clean(asdict(obj))
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    return obj


def dumps(obj):
    return json.dumps(clean(obj), sort_keys=True, indent=1, allow_nan=False) + "\n"


def config_hash(cfg):
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def finish(report, verdicts):
    report["verdicts"] = [asdict(v) for v in verdicts]
    report["passed"] = all(v.passed for v in verdicts)
    return report
