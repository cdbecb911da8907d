"""Empirical constants for the maximal, Burkholder and Doob inequalities."""

import numpy as np

from .. import rng
from ..grid import Rect
from ..models.serialize import model_from_json
from ..norms import luxemburg_norm, lp_norm, weak_lp_norm
from ..sums import normalizer_grid, prefix_array
from .common import Verdict, chunk_size, loglog_slope, finish, map_paths, no_growth_verdict, path_keys
from .lln import base_report

SITE_SALT = 0x51_7E


def site_norms(model, n, seed):
    """||X_1|| for ``n`` independent draws (keys disjoint from the path keys)."""
    keys = rng.derive(rng.derive(int(seed), SITE_SALT)[0], np.arange(n))
    site = Rect((1,) * model.d, (1,) * model.d)
    return model.norm(model.evaluate(site, keys)).reshape(-1)


def _sorted_horizons(cfg):
    return sorted(int(h) for h in cfg["horizons"])


def check_maximal_inequality(cfg, seed, workers=1):
    """Weak-L^p norm of sup_{n <= N} ||S_n|| / |n|^{1/p} against ||X_0||_{p,d-1}."""
    model = model_from_json(cfg["model"])
    p = cfg["p"]
    q = cfg.get("q", model.d - 1)
    horizons = _sorted_horizons(cfg)
    region = Rect.cube(horizons[-1], model.d)
    norm = normalizer_grid(region.shape, p)

    def batch(a, b):
        vals = model.evaluate(region, path_keys(seed, a, b))
        ratio = model.norm(prefix_array(vals, range(1, model.d + 1))) / norm
        out = np.empty((ratio.shape[0], len(horizons)))
        for j, N in enumerate(horizons):
            sub = ratio[(slice(None),) + (slice(0, N),) * model.d]
            out[:, j] = sub.reshape(ratio.shape[0], -1).max(axis=1)
        return out

    sups = map_paths(batch, cfg["paths"], workers, chunk_size(model, region))
    rhs = luxemburg_norm(site_norms(model, int(cfg.get("site_samples", 20000)), seed), p, q)
    table = []
    for j, N in enumerate(horizons):
        lhs = weak_lp_norm(sups[:, j], p)
        table.append({"N": N, "weak_lp_sup": lhs, "orlicz_rhs": rhs,
                      "ratio": lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else None)})
    ratios = [r["ratio"] if r["ratio"] is not None else np.inf for r in table]
    slope, verdict = no_growth_verdict("ratio_no_growth", horizons, ratios)
    rep = base_report(cfg, seed, model)
    rep.update({"p": p, "q": q, "paths": cfg["paths"], "horizons": horizons, "table": table,
                "slope": slope, "per_path": sups})
    return finish(rep, [verdict])


def check_burkholder(cfg, seed, workers=1):
    """||S_{n1}||_r against (n^d E||D||^r)^{1/r}, and the Doob maximal ratio in L^p."""
    model = model_from_json(cfg["model"])
    d = model.d
    p = cfg["p"]
    r = float(cfg.get("r") or model.norm.smoothness)
    horizons = _sorted_horizons(cfg)
    region = Rect.cube(horizons[-1], d)

    def batch(a, b):
        vals = model.evaluate(region, path_keys(seed, a, b))
        nr = model.norm(prefix_array(vals, range(1, d + 1)))
        end = np.empty((nr.shape[0], len(horizons)))
        mx = np.empty_like(end)
        for j, n in enumerate(horizons):
            sub = nr[(slice(None),) + (slice(0, n),) * d]
            end[:, j] = sub[(slice(None),) + (n - 1,) * d]
            mx[:, j] = sub.reshape(nr.shape[0], -1).max(axis=1)
        return end, mx

    end, mx = map_paths(batch, cfg["paths"], workers, chunk_size(model, region))
    dn = site_norms(model, int(cfg.get("site_samples", 20000)), seed)
    moment_r = float(np.mean(dn**r))
    doob_bound = (p / (p - 1.0)) ** d
    table, b_ratios, doob_ratios = [], [], []
    for j, n in enumerate(horizons):
        lhs = lp_norm(end[:, j], r)
        rhs = (n**d * moment_r) ** (1.0 / r)
        sp = lp_norm(end[:, j], p)
        mp = lp_norm(mx[:, j], p)
        br = lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else np.inf)
        dr = mp / sp if sp > 0 else (0.0 if mp == 0 else np.inf)
        b_ratios.append(br)
        doob_ratios.append(dr)
        table.append({"N": n, "sum_lr": lhs, "burkholder_rhs": rhs, "burkholder_ratio": br,
                      "max_lp": mp, "sum_lp": sp, "doob_ratio": dr})
    b_slope, vb = no_growth_verdict("burkholder_no_growth", horizons, b_ratios)
    # the Doob ratio rises from 1 towards its limit, so only the bound is a verdict
    d_slope = loglog_slope(horizons, doob_ratios)
    verdicts = [vb, Verdict("doob_bound", bool(max(doob_ratios) <= doob_bound), max(doob_ratios),
                                doob_bound, "max ratio against (p/(p-1))^d")]
    target = cfg.get("target")
    if target is not None:
        dev = max(abs(x - target["value"]) for x in b_ratios)
        verdicts.append(Verdict("burkholder_target", bool(dev <= target["tol"]), dev, target["tol"],
                                f"max |ratio - {target['value']}|"))
    rep = base_report(cfg, seed, model)
    rep.update({"p": p, "r": r, "paths": cfg["paths"], "horizons": horizons,
                "moment_r": moment_r, "table": table, "slope": b_slope, "doob_slope": d_slope})
    return finish(rep, verdicts)
