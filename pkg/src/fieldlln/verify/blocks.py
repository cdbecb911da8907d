"""Checks on m-dependent components: block decomposition and the shell bound."""

import numpy as np

from .. import rng
from ..dependence import delta_profile
from ..grid import Rect
from ..models.fields import sup_ball_offsets
from ..models.mdep import block_decompose, mdep_values
from ..models.serialize import model_from_json
from ..norms import NormSpec, luxemburg_norm
from .common import Verdict, finish, no_growth_verdict
from .lln import base_report

BLOCK_SALT = 0xB1_0C
SHELL_SALT = 0xB1_0D


def block_bound(values, region, m_level, norm):
    """(||sum_i X_i||, sum over classes ||sum_class X||) per realization.

    ``values`` is (B, *region.shape, m) with region's lower corner at 1.
    """
    total = norm(values.reshape(values.shape[0], -1, values.shape[-1]).sum(axis=1))
    bound = np.zeros_like(total)
    for cls in block_decompose(region, m_level):
        idx = tuple((cls.sites() - 1).T)
        part = values[(slice(None),) + idx]
        bound += norm(part.sum(axis=1))
    return total, bound


def check_block_decomposition(model, m_level, region, seed, realizations=100, replicates=64):
    """Pointwise triangle bound over congruence classes, plus independence sanity.

    Returns a dict with the per-realization slack and verdicts.
    """
    keys = rng.derive(int(seed), np.arange(realizations))
    vals, _ = mdep_values(model, m_level, region, keys, replicates,
                          int(rng.derive(seed, BLOCK_SALT)[0]))
    total, bound = block_bound(vals, region, m_level, model.norm)
    tol = 1e-9 * np.maximum(1.0, bound)
    verdicts = [Verdict("pointwise_bound", bool(np.all(total <= bound + tol)),
                        float(np.max(total - bound)), 0.0, "max of lhs - rhs over realizations")]
    if m_level == 0 or len(block_decompose(region, m_level)) == 1:
        err = float(np.max(np.abs(total - bound) / np.maximum(1.0, bound)))
        verdicts.append(Verdict("single_class_equality", err <= 1e-12, err, 1e-12))
    corr_max, limit = 0.0, 4.0 / np.sqrt(realizations)
    s = 2 * m_level + 1
    for cls in block_decompose(region, m_level):
        if cls.j_range.shape[0] < 2:
            continue
        a = tuple(o - 1 for o in cls.offset)
        b = (a[0] + s,) + a[1:]
        x = vals[(slice(None),) + a + (0,)]
        y = vals[(slice(None),) + b + (0,)]
        if np.std(x) == 0 or np.std(y) == 0:
            continue
        corr_max = max(corr_max, abs(float(np.corrcoef(x, y)[0, 1])))
    verdicts.append(Verdict("class_independence", bool(corr_max <= limit), corr_max, float(limit),
                            "max |corr| of neighbouring class members"))
    return finish({"m_level": m_level, "region": [list(region.lower), list(region.upper)],
                   "realizations": realizations, "slack_min": float(np.min(bound - total))},
                  verdicts)


def shell_delta_norm(deltas, p):
    return float(sum(v**p for v in deltas) ** (1.0 / p))


def run_block_decomposition(cfg, seed, workers=1):
    """Experiment wrapper over ``check_block_decomposition`` for each side and level."""
    model = model_from_json(cfg["model"])
    rep = base_report(cfg, seed, model)
    rows, verdicts = [], []
    for j, side in enumerate(int(h) for h in cfg["horizons"]):
        for m_level in cfg.get("m_levels", [0, 1]):
            res = check_block_decomposition(model, int(m_level), Rect.cube(side, model.d),
                                            int(rng.derive(seed, j * 1000 + int(m_level))[0]),
                                            cfg["paths"], int(cfg.get("replicates", 64)))
            rows.append({"N": side, "m_level": int(m_level), "slack_min": res["slack_min"],
                         "passed": res["passed"]})
            verdicts += [dict(v, name=f"N{side}_m{m_level}:{v['name']}") for v in res["verdicts"]]
    rep["table"] = rows
    rep["verdicts"] = verdicts
    rep["passed"] = all(v["passed"] for v in verdicts)
    return rep


def run_mdep_bound(cfg, seed, workers=1):
    """||X_{0,m}||_{p,q} against (sum_{||i||_inf = m} delta(i)^p)^{1/p} across m."""
    model = model_from_json(cfg["model"])
    p = cfg["p"]
    q = cfg.get("q", model.d - 1)
    spec = NormSpec.orlicz(p, q)
    d, K = model.d, model.window
    levels = [int(m) for m in cfg.get("m_levels", range(K + 1))]
    n = int(cfg["paths"])
    site = Rect((0,) * d, (0,) * d)
    offsets = [tuple(int(c) for c in k) for k in sup_ball_offsets(K, d)]
    prof = delta_profile(model, offsets, spec, int(cfg.get("delta_pairs", 2000)),
                         int(rng.derive(seed, SHELL_SALT)[0]))
    table, ratios = [], []
    for m_level in levels:
        keys = rng.derive(int(seed), np.arange(n) + m_level * n)
        vals, _ = mdep_values(model, m_level, site, keys, int(cfg.get("replicates", 64)),
                              int(rng.derive(seed, m_level)[0]))
        lhs = luxemburg_norm(model.norm(vals.reshape(n, -1)), p, q)
        shell = [prof.entries[k].value for k in offsets if max(abs(c) for c in k) == m_level]
        rhs = shell_delta_norm(shell, p)
        ratio = lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else np.inf)
        ratios.append(ratio)
        table.append({"N": m_level, "component_norm": lhs, "shell_delta": rhs, "ratio": ratio})
    slope, verdict = no_growth_verdict("ratio_no_growth", [m + 1 for m in levels], ratios)
    rep = base_report(cfg, seed, model)
    rep.update({"p": p, "q": q, "table": table, "slope": slope,
                "constant": float(max(r for r in ratios if np.isfinite(r))) if ratios else None})
    return finish(rep, [verdict])
