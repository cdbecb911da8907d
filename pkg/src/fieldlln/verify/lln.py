"""Law-of-large-numbers experiments on rectangles, squares and in L^p."""

import numpy as np

from .. import rng
from ..dependence import detect_d0
from ..grid import Rect
from ..models.fields import DShift
from ..models.serialize import model_from_json
from ..norms import bootstrap_stderr, lp_norm
from ..sums import level_profile, normalizer_grid, prefix_array, square_trajectory_array
from .common import (
    chunk_size, config_hash, decay_verdicts, finish, hypothesis_violations, map_paths,
    path_keys, quantile_rows, Verdict,
)

D0_SALT = 0xD0


def base_report(cfg, seed, model=None):
    rep = {"id": cfg["id"], "kind": cfg["kind"], "seed": int(seed), "config_sha256": config_hash(cfg)}
    if model is not None:
        from ..models.sampling import model_id
        rep["model_id"] = model_id(model)
    return rep


def resolve_expect(cfg, violations):
    exp = cfg.get("expect", "auto")
    if exp == "auto":
        return "no_decay" if violations else "decay"
    return exp


def resolve_d0(cfg, model, seed):
    """(d0 or None, detection table or None) according to the normalization option."""
    mode = cfg.get("normalization", "plain")
    if mode == "plain" or (mode == "auto" and not isinstance(model, DShift)):
        return None, None
    if cfg.get("d0") is not None:
        return int(cfg["d0"]), None
    if not isinstance(model, DShift):
        raise ValueError("pi normalization without an explicit d0 needs a DShift model")
    res = detect_d0(model, int(cfg.get("d0_replicates", 200)), int(rng.derive(seed, D0_SALT)[0]),
                    n_outer=int(cfg.get("d0_outer", 200)))
    table = [{"subset": list(I), "l1_mean": m, "energy": e, "energy_stderr": s}
             for I, m, e, s in res.table]
    return res.d0, {"d0": res.d0, "ambiguous": res.ambiguous, "components": table}


def _prefix_norms(model, region, keys):
    vals = model.evaluate(region, keys)
    return model.norm(prefix_array(vals, range(1, model.d + 1)))


def _decay_report(cfg, seed, model, horizons, values, extra):
    violations = hypothesis_violations(model, cfg["p"])
    expect = resolve_expect(cfg, violations)
    rows = quantile_rows(horizons, values)
    slope, ratio, verdicts = decay_verdicts(horizons, [r["median"] for r in rows], expect,
                                            cfg.get("thresholds"))
    q90_slope = decay_verdicts(horizons, [r["q90"] for r in rows], "none")[0]
    rep = base_report(cfg, seed, model)
    rep.update(extra)
    rep.update({
        "p": cfg["p"], "paths": cfg["paths"], "horizons": list(horizons),
        "hypothesis_violating": bool(violations), "violations": violations, "expect": expect,
        "table": rows, "slope": slope, "slope_q90": q90_slope, "median_ratio": ratio,
        "per_path": values,
    })
    return finish(rep, verdicts)


def run_lln_rectangles(cfg, seed, workers=1):
    """Censored sup over rectangles, sup{||S_n|| / |n|^{1/p} : max n >= N}."""
    model = model_from_json(cfg["model"])
    horizons = sorted(int(h) for h in cfg["horizons"])
    side = int(cfg.get("censor") or horizons[-1])
    if side < horizons[-1]:
        raise ValueError("censoring side must cover the largest horizon")
    region = Rect.cube(side, model.d)
    p = cfg["p"]
    d0, d0_info = resolve_d0(cfg, model, seed)
    norm = normalizer_grid(region.shape, p, d0)
    cols = [h - 1 for h in horizons]

    def batch(a, b):
        nr = _prefix_norms(model, region, path_keys(seed, a, b))
        return level_profile(nr / norm)[:, cols]

    values = map_paths(batch, cfg["paths"], workers, chunk_size(model, region))
    if np.any(np.diff(values, axis=1) > 0):
        raise AssertionError("censored sup statistic increased with N on some path")
    extra = {"censoring": {"region_side": side, "statistic": "sup over n in region, max n >= N"},
             "normalization": "plain" if d0 is None else "pi", "d0": d0, "d0_detection": d0_info}
    return _decay_report(cfg, seed, model, horizons, values, extra)


def run_lln_squares(cfg, seed, workers=1):
    """Censored diagonal sup, sup{||S_{n1}|| / norm(n) : N <= n <= side}."""
    model = model_from_json(cfg["model"])
    horizons = sorted(int(h) for h in cfg["horizons"])
    side = int(cfg.get("censor") or horizons[-1])
    if side < horizons[-1]:
        raise ValueError("censoring side must cover the largest horizon")
    region = Rect.cube(side, model.d)
    d0, d0_info = resolve_d0(cfg, model, seed)
    cols = [h - 1 for h in horizons]

    def batch(a, b):
        nr = _prefix_norms(model, region, path_keys(seed, a, b))
        tr = square_trajectory_array(nr, cfg["p"], d0)
        return np.maximum.accumulate(tr[:, ::-1], axis=1)[:, ::-1][:, cols]

    values = map_paths(batch, cfg["paths"], workers, chunk_size(model, region))
    d = model.d
    expo = d / cfg["p"] if d0 is None else d0 / cfg["p"] + d - d0
    extra = {"censoring": {"region_side": side, "statistic": "sup over N <= n <= side on the diagonal"},
             "normalization": "plain" if d0 is None else "pi", "d0": d0, "d0_detection": d0_info,
             "normalization_exponent": expo}
    return _decay_report(cfg, seed, model, horizons, values, extra)


def lp_regime_points(regime, h, d):
    if regime == "single":
        return (h,) + (2,) * (d - 1)
    if regime == "diagonal":
        return (h,) * d
    raise ValueError(f"unknown regime {regime!r}")


def run_lp_convergence(cfg, seed, workers=1):
    """|| |N|^{-1/p} max_{n <= N} ||S_n|| ||_p across paths, per regime."""
    model = model_from_json(cfg["model"])
    p = cfg["p"]
    horizons = sorted(int(h) for h in cfg["horizons"])
    regimes = cfg.get("regimes", ["single", "diagonal"])
    violations = hypothesis_violations(model, p)
    rep = base_report(cfg, seed, model)
    rep.update({"p": p, "paths": cfg["paths"], "horizons": horizons,
                "hypothesis_violating": bool(violations), "violations": violations})
    verdicts, table, per_regime = [], [], {}
    for ri, regime in enumerate(regimes):
        tops = [lp_regime_points(regime, h, model.d) for h in horizons]
        region = Rect.from_sides(tops[-1])
        rseed = int(rng.derive(seed, ri)[0])

        def batch(a, b, tops=tops, region=region, rseed=rseed):
            nr = _prefix_norms(model, region, path_keys(rseed, a, b))
            out = np.empty((nr.shape[0], len(tops)))
            for j, N in enumerate(tops):
                sub = nr[(slice(None),) + tuple(slice(0, n) for n in N)]
                out[:, j] = sub.reshape(nr.shape[0], -1).max(axis=1) / float(np.prod(N)) ** (1.0 / p)
            return out

        vals = map_paths(batch, cfg["paths"], workers, chunk_size(model, region))
        norms, ses = [], []
        for j, N in enumerate(tops):
            col = vals[:, j]
            v = lp_norm(col, p)
            se = bootstrap_stderr(col, lambda s: lp_norm(s, p), 200, rseed + j)
            norms.append(v)
            ses.append(se)
            table.append({"N": horizons[j], "regime": regime, "point": list(N), "lp_norm": v,
                          "stderr": se})
        from .common import loglog_slope
        slope = loglog_slope(horizons, norms)
        per_regime[regime] = {"slope": slope, "per_path": vals}
        if all(v == 0 for v in norms):
            verdicts.append(Verdict(f"{regime}_degenerate_zero", True, 0.0))
        elif not violations:
            gap = norms[0] - norms[-1]
            band = 2.0 * float(np.hypot(ses[0], ses[-1]))
            verdicts.append(Verdict(f"{regime}_decreasing", gap > band, gap, band,
                                    "first minus last L^p norm against 2 combined stderr"))
        else:
            verdicts.append(Verdict(f"{regime}_descriptive", True, slope, None, "hypothesis-violating run"))
    rep.update({"table": table, "regimes": per_regime,
                "rates": "log-log slopes are descriptive; no reference rate exists"})
    return finish(rep, verdicts)
