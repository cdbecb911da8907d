"""Bernoulli-shift experiments: coupling coefficients, the Hölder bound and decay."""

import numpy as np

from .. import rng
from ..dependence import delta_profile
from ..models.fields import BernoulliField, sup_ball_offsets
from ..models.serialize import model_from_json
from ..norms import NormSpec, bootstrap_stderr, norm_of
from ..space import operator_norm
from .common import Verdict, finish
from .lln import base_report, run_lln_rectangles, run_lln_squares, run_lp_convergence

DELTA_SALT = 0xB0_0001
MOMENT_SALT = 0xB0_0002
SUB_RUNS = {"rect_sup": run_lln_rectangles, "square_diag": run_lln_squares, "lp_max": run_lp_convergence}


def hypothesis_sum(deltas, d, p):
    """sum_k k^{d(1-1/p)} (sum_{||i||_inf = k} delta(i)^p)^{1/p}.

    ``deltas`` maps offsets to coupling coefficients; missing offsets count as 0.
    """
    shells = {}
    for i, v in deltas.items():
        k = max(abs(c) for c in i)
        shells[k] = shells.get(k, 0.0) + float(v) ** p
    return float(sum(k ** (d * (1.0 - 1.0 / p)) * s ** (1.0 / p) for k, s in shells.items()))


def moment_factor(model, alpha, spec, n, seed, n_boot=200):
    """Norm of ||eps - eps'||^alpha under ``spec`` for independent innovations."""
    keys = rng.derive(int(seed), np.arange(n))
    site = np.zeros((1, model.d), dtype=np.int64)
    e1 = model.dist.sample(keys, 0, site)[:, 0]
    e2 = model.dist.sample(rng.derive(keys, MOMENT_SALT), 0, site)[:, 0]
    v = model.norm(e1 - e2) ** alpha
    val = norm_of(v, spec)
    return val, bootstrap_stderr(v, lambda s: norm_of(s, spec), n_boot, seed)


def run_bernoulli_lln(cfg, seed, workers=1):
    """Coupling coefficients over the window, the hypothesis sum, then decay runs."""
    model = model_from_json(cfg["model"])
    if not isinstance(model, BernoulliField):
        raise TypeError("bernoulli experiments need a BernoulliField model")
    p = cfg["p"]
    q = cfg.get("q", model.d - 1)
    spec = NormSpec.orlicz(p, q)
    n_pairs = int(cfg.get("delta_pairs", 2000))
    d = model.d
    offsets = [tuple(int(c) for c in k) for k in sup_ball_offsets(model.window, d)]
    prof = delta_profile(model, offsets, spec, n_pairs, int(rng.derive(seed, DELTA_SALT)[0]))

    alpha, const = model.link.holder(model.m, model.norm.s)
    mf, mf_se = moment_factor(model, alpha, spec, n_pairs, int(rng.derive(seed, MOMENT_SALT)[0]))
    rows, ratios, ratio_se, holder_ok = [], [], [], True
    for k in offsets:
        est = prof.entries[k]
        a = operator_norm(model.coefficient(k), model.norm)
        row = {"k": list(k), "delta": est.value, "stderr": est.stderr, "coef_norm": a}
        if a > 0:
            scale = a ** alpha
            row["ratio"] = est.value / scale
            row["ratio_stderr"] = est.stderr / scale
            ratios.append(row["ratio"])
            ratio_se.append(row["ratio_stderr"])
            if const is not None:
                bound = const * scale * mf
                slack = 4.0 * (est.stderr + const * scale * mf_se)
                row["holder_bound"] = bound
                holder_ok &= est.value <= bound + slack
        rows.append(row)

    verdicts = []
    ratios, ratio_se = np.asarray(ratios), np.asarray(ratio_se)
    linear = model.link.kind == "identity"
    if not linear:
        pooled = float(np.mean(ratios)) if len(ratios) else 0.0
        verdicts.append(Verdict("delta_ratio_constant", True, None, None,
                                "nonlinear link; ratios reported only"))
    elif len(ratios) and np.all(ratio_se > 0):
        w = 1.0 / ratio_se**2
        pooled = float(np.sum(w * ratios) / np.sum(w))
        worst = float(np.max(np.abs(ratios - pooled) / ratio_se))
        verdicts.append(Verdict("delta_ratio_constant", worst <= 4.0, worst, 4.0,
                                f"max |ratio - pooled| / stderr, pooled ratio {pooled:.6g}"))
    else:
        pooled = float(ratios[0]) if len(ratios) else 0.0
        verdicts.append(Verdict("delta_ratio_constant", bool(np.all(ratios == pooled)), 0.0, 4.0,
                                "zero standard errors"))
    if const is None:
        verdicts.append(Verdict("holder_bound", True, None, None, "link not globally Hölder; descriptive"))
    else:
        verdicts.append(Verdict("holder_bound", bool(holder_ok), const, None,
                                "delta <= K(g) ||A_k||^alpha * moment factor within 4 stderr"))
    hsum = hypothesis_sum({tuple(r["k"]): r["delta"] for r in rows}, d, p)
    verdicts.append(Verdict("hypothesis_sum_finite", bool(np.isfinite(hsum)), hsum))

    rep = base_report(cfg, seed, model)
    rep.update({
        "p": p, "q": q, "delta_pairs": n_pairs, "holder_alpha": alpha, "holder_constant": const,
        "moment_factor": mf, "moment_factor_stderr": mf_se, "pooled_ratio": pooled,
        "hypothesis_sum": hsum, "tail_mass": model.tail_mass(alpha * p), "deltas": rows,
        "statistics": {},
    })
    table = []
    for j, kind in enumerate(cfg.get("statistics", ["rect_sup"])):
        sub = {k: v for k, v in cfg.items() if k not in ("statistics", "delta_pairs", "q")}
        sub["id"] = f"{cfg['id']}/{kind}"
        sub["kind"] = kind
        res = SUB_RUNS[kind](sub, int(rng.derive(seed, j)[0]), workers)
        rep["statistics"][kind] = res
        for v in res["verdicts"]:
            verdicts.append(Verdict(f"{kind}:{v['name']}", v["passed"], v["value"], v["threshold"],
                                    v["detail"]))
        for row in res["table"]:
            table.append(dict(row, statistic=kind))
    rep["table"] = table
    return finish(rep, verdicts)
