"""Dispatch experiments, write per-experiment reports and the run manifest."""

import csv
import io
import os
from dataclasses import asdict

from .blocks import run_block_decomposition, run_mdep_bound
from .bernoulli import run_bernoulli_lln
from .common import Verdict, dumps, finish
from .config import EXPERIMENT_KINDS, budget, experiment_seed
from .inequalities import check_burkholder, check_maximal_inequality
from .lln import base_report, run_lln_rectangles, run_lln_squares, run_lp_convergence
from .truncation import NAMES, check_truncation_series, expectation_ratio


def run_truncation(cfg, seed, workers=1):
    """Sup ratios on a log grid and its refinement, plus optional expectations."""
    g = cfg.get("grid", {})
    d, p, r = cfg["d"], cfg["p"], cfg["r"]
    rows = check_truncation_series(d, p, r, g.get("lo", 1e-3), g.get("hi", 1e6), g.get("points", 2000))
    verdicts = [Verdict(f"{row.name}_finite_stable", row.stable, row.relative_change, 0.01)
                for row in rows]
    rep = base_report(cfg, seed)
    rep.update({"d": d, "p": p, "r": r, "table": [asdict(row) for row in rows]})
    dist = cfg.get("distribution")
    if dist is not None:
        rep["expectations"] = [
            dict(zip(("name", "lhs", "rhs", "ratio"), (n,) + expectation_ratio(n, dist["values"], dist["probs"], d, p, r)))
            for n in NAMES
        ]
    return finish(rep, verdicts)


RUNNERS = {
    "lln_rectangles": run_lln_rectangles,
    "lln_squares": run_lln_squares,
    "lp_convergence": run_lp_convergence,
    "maximal_inequality": check_maximal_inequality,
    "burkholder": check_burkholder,
    "bernoulli_lln": run_bernoulli_lln,
    "block_decomposition": run_block_decomposition,
    "mdep_bound": run_mdep_bound,
    "truncation_series": run_truncation,
}
assert set(RUNNERS) == set(EXPERIMENT_KINDS)


def run_experiment(exp, seed, workers=1):
    """Run one validated experiment; adds its budget to the report."""
    rep = RUNNERS[exp["kind"]](exp, seed, workers)
    rep["budget"] = budget(exp)
    return rep


def _numeric(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def csv_rows(rep):
    """Flat rows (experiment, N, quantity, value) from the report table."""
    out = []
    for row in rep.get("table", []):
        tag = "/".join(str(row[k]) for k in ("statistic", "regime", "name") if k in row)
        N = row.get("N", row.get("k", ""))
        for key, val in row.items():
            if key in ("N", "statistic", "regime", "name") or not _numeric(val):
                continue
            out.append((rep["id"], N if not isinstance(N, list) else "x".join(map(str, N)),
                        f"{tag}:{key}" if tag else key, repr(float(val))))
    return out


def write_csv(path, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["experiment", "N", "quantity", "value"])
    w.writerows(rows)
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())


def run_config(cfg, out_dir, seed=None, workers=1, config_path=None, log=None):
    """Run every experiment of a validated config; returns the manifest dict.

    Budgets are checked for all experiments before any sampling.  An
    experiment over budget is skipped, an experiment that raises is failed.
    """
    os.makedirs(out_dir, exist_ok=True)
    plans = [(exp, budget(exp)) for exp in cfg["experiments"]]
    entries = []
    for exp, plan in plans:
        s = experiment_seed(cfg, exp, seed)
        entry = {"id": exp["id"], "kind": exp["kind"], "seed": s, "budget": plan}
        if not plan["ok"]:
            entry["status"] = "skipped"
            entry["reason"] = f"memory budget: needs {plan['bytes']} bytes, cap {plan['cap']}"
            entries.append(entry)
            continue
        if log:
            log(f"{exp['id']}: {exp['kind']} seed={s} samples={plan['samples']} peak_bytes={plan['bytes']}")
        try:
            rep = run_experiment(exp, s, workers)
        except Exception as err:  # noqa: BLE001 - recorded in the manifest
            entry["status"] = "failed"
            entry["reason"] = f"{type(err).__name__}: {err}"
            entries.append(entry)
            continue
        with open(os.path.join(out_dir, f"{exp['id']}.json"), "w") as fh:
            fh.write(dumps(rep))
        write_csv(os.path.join(out_dir, f"{exp['id']}.csv"), csv_rows(rep))
        entry["status"] = "ok" if rep["passed"] else "failed"
        if not rep["passed"]:
            entry["reason"] = "verdict failure: " + ", ".join(
                v["name"] for v in rep["verdicts"] if not v["passed"])
        entries.append(entry)
        if log:
            log(f"{exp['id']}: {'pass' if rep['passed'] else 'FAIL'}")
    manifest = {"config": config_path, "out_dir": out_dir, "seed": seed, "workers": workers,
                "experiments": entries}
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        fh.write(dumps(manifest))
    return manifest


def describe(cfg, seed=None):
    """Plain-text plan: experiments, what each checks and its budget."""
    lines = [f"schema_version {cfg['schema_version']}, {len(cfg['experiments'])} experiment(s)"]
    for exp in cfg["experiments"]:
        b = budget(exp)
        flag = "ok" if b["ok"] else "OVER BUDGET"
        lines.append(f"- {exp['id']} [{exp['kind']}] seed={experiment_seed(cfg, exp, seed)}")
        lines.append(f"    checks: {EXPERIMENT_KINDS[exp['kind']]}")
        if exp["kind"] != "truncation_series":
            lines.append(f"    model: {exp['model']['kind']}, p={exp['p']}, horizons={exp['horizons']}, "
                         f"paths={exp['paths']}")
        lines.append(f"    budget: peak {b['bytes']} bytes (cap {b['cap']}), "
                     f"{b['samples']} field samples [{flag}]")
    return "\n".join(lines)
