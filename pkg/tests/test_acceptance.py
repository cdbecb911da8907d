"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Every criterion is checked at its stated tolerance.  Where a criterion
has several parts, its line passes only if all of them do; the detail
string carries the measured numbers.
"""

import itertools
import json
import math
import time
import warnings

import numpy as np
import pytest

from fieldlln import rng
from fieldlln.dependence import NestedBiasWarning, detect_d0, orthomartingale_check, projector_norm
from fieldlln.grid import Rect
from fieldlln.models import AxisFilter, AxisMDS, DShift, IID, InnovationDist, Link, ProductOM
from fieldlln.models.serialize import model_from_json
from fieldlln.norms import NormSpec, lp_norm, lpq_moment, luxemburg_norm, phi, weak_lp_norm
from fieldlln.sums import prefix_from_values, rect_sum
from fieldlln.verify import (
    check_burkholder, check_truncation_series, run_bernoulli_lln, run_config, run_lln_rectangles,
    run_lln_squares,
)
from fieldlln.verify.inequalities import site_norms
from fieldlln.verify.truncation import lhs

RAD = {"kind": "rademacher"}
PRODUCT_RAD = {"kind": "product_om", "axes": [{"dist": RAD}] * 2}
DECAY = {"p": 1.5, "horizons": [4, 16, 64], "paths": 200}


def verdict(rep, name):
    return next(v for v in rep["verdicts"] if v["name"] == name)


def random_rects(gen, shape, count):
    for _ in range(count):
        lo, hi = [], []
        for s in shape:
            a, b = sorted(gen.integers(1, s + 1, size=2))
            lo.append(int(a))
            hi.append(int(b))
        yield Rect(tuple(lo), tuple(hi))


def test_c01_prefix_sums(criterion):
    t0 = time.perf_counter()
    gen = np.random.default_rng(1)
    exact = True
    for d in (1, 2, 3):
        for _ in range(50):
            shape = tuple(int(s) for s in gen.integers(1, 7, size=d))
            vals = gen.integers(-50, 51, size=shape + (1,))
            table = prefix_from_values(vals)
            # every rectangle of the box
            for lo in itertools.product(*[range(1, s + 1) for s in shape]):
                for hi in itertools.product(*[range(a, s + 1) for a, s in zip(lo, shape)]):
                    sl = tuple(slice(a - 1, b) for a, b in zip(lo, hi))
                    exact &= int(rect_sum(table, Rect(lo, hi))[0]) == int(vals[sl].sum())
    worst = 0.0
    for shape in [(1_000_000,), (1000, 1000), (100, 100, 100)]:
        vals = gen.uniform(-1, 1, size=shape + (1,)) + 0.25
        table = prefix_from_values(vals)
        for r in list(random_rects(gen, shape, 8)) + [Rect.from_sides(shape)]:
            sl = tuple(slice(a - 1, b) for a, b in zip(r.lower, r.upper))
            ref = math.fsum(vals[sl].ravel())
            got = float(rect_sum(table, r)[0])
            worst = max(worst, abs(got - ref) / max(abs(ref), 1e-300))
    runtime = time.perf_counter() - t0
    ok = exact and worst <= 1e-10 and runtime < 30
    criterion(1, ok, f"integer exact={exact}, real max rel err={worst:.2e}, {runtime:.1f}s")
    assert ok


def test_c02_orlicz_solver(criterion):
    t0 = time.perf_counter()
    gen = np.random.default_rng(2)
    root_err = hom_err = lp_err = 0.0
    for _ in range(1000):
        n = int(gen.integers(1, 200))
        p = float(gen.uniform(1.05, 3.0))
        q = float(gen.uniform(0.2, 3.0))
        v = np.abs(gen.standard_t(3, size=n)) * float(gen.uniform(0.01, 100))
        lam = luxemburg_norm(v, p, q)
        if lam > 0:
            root_err = max(root_err, abs(float(np.mean(phi(p, q, v / lam))) - 1.0))
        c = float(gen.uniform(0.1, 10))
        hom_err = max(hom_err, abs(luxemburg_norm(c * v, p, q) - c * lam) / max(c * lam, 1e-300))
        lp_err = max(lp_err, abs(luxemburg_norm(v, p, 0.0) - lp_norm(v, p)))
    runtime = time.perf_counter() - t0
    ok = root_err <= 1e-6 and hom_err <= 1e-8 and lp_err <= 1e-9 and runtime < 10
    criterion(2, ok, f"root {root_err:.1e}, homogeneity {hom_err:.1e}, q=0 vs lp {lp_err:.1e}, "
                     f"{runtime:.1f}s")
    assert ok


def test_c03_weak_lp_exact(criterion):
    t0 = time.perf_counter()
    gen = np.random.default_rng(3)
    worst = 0.0
    for _ in range(200):
        n = int(gen.integers(1, 13))
        p = float(gen.uniform(1.1, 4.0))
        v = gen.exponential(size=n) * (gen.uniform(size=n) < 0.8)
        masks = np.array(list(itertools.product((0, 1), repeat=n))[1:], dtype=float)
        size = masks.sum(axis=1) / n
        brute = float(np.max(size ** (-1 + 1 / p) * (masks @ v) / n))
        worst = max(worst, abs(weak_lp_norm(v, p) - brute) / max(brute, 1e-300))
    runtime = time.perf_counter() - t0
    ok = worst <= 1e-12 and runtime < 10
    criterion(3, ok, f"max rel diff vs 2^n search {worst:.1e}, {runtime:.1f}s")
    assert ok


def test_c04_orthomartingale_property(criterion):
    dists = [InnovationDist.gaussian(), InnovationDist.uniform(-1, 1)]
    passes = 0
    for trial in range(100):
        d = 1 + trial % 3
        axes = tuple(AxisMDS(dists[(trial // 3 + ell) % 2], 1.0, (0.5,) if ell == 0 and trial % 2 else ())
                     for ell in range(d))
        checks = orthomartingale_check(ProductOM(axes), (3,) * d, 8, 64, trial, antithetic=False)
        passes += all(c.passed for c in checks)
    ok = passes >= 95
    criterion(4, ok, f"{passes}/100 trials pass on every axis (d=1..3, plain replicates)")
    assert ok


def test_c05_projector_structure(criterion):
    lp = NormSpec.lp(1.5)
    uni = InnovationDist.uniform(-1, 1)
    exact = (1 / 2.5) ** (1 / 1.5)  # ||eps - E eps||_1.5 for U(-1, 1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NestedBiasWarning)
        p0 = projector_norm(IID(uni, 2), (0, 0), lp, 400, 8, 1)
        off = [projector_norm(IID(uni, 2), k, lp, 100, 8, 2 + j)
               for j, k in enumerate([(1, 0), (0, 1), (1, 1)])]
        from fieldlln.models import geometric_linear_field
        f = geometric_linear_field(2, 0.5, 1, uni, Link("tanh"))
        a = projector_norm(f, (1, 0), lp, 300, 20, 4)
        b = projector_norm(f, (3, 2), lp, 300, 20, 5, site=(2, 2))
    k0 = abs(p0.norm_value - exact) <= 4 * p0.stderr
    k_off = all(e.norm_value <= 4 * e.stderr + 1e-12 for e in off)
    stat = abs(a.norm_value - b.norm_value) <= 4 * math.hypot(a.stderr, b.stderr)
    ok = k0 and k_off and stat
    criterion(5, ok, f"k=0 {p0.norm_value:.4f} vs {exact:.4f} (se {p0.stderr:.4f}); "
                     f"off-zero max {max(e.norm_value for e in off):.1e}; "
                     f"stationarity {a.norm_value:.4f} vs {b.norm_value:.4f}")
    assert ok


def test_c06_lln_decay_and_control(criterion):
    t0 = time.perf_counter()
    main = run_lln_rectangles(dict(DECAY, id="c6", kind="lln_rectangles", model=PRODUCT_RAD), 0, 4)
    pareto = {"kind": "iid", "d": 2, "dist": {"kind": "pareto", "beta": 1.2}}
    control = run_lln_rectangles(dict(DECAY, id="c6-control", kind="lln_rectangles", model=pareto), 0, 4)
    runtime = time.perf_counter() - t0
    main_ok = main["median_ratio"] < 0.5 and main["slope"] < -0.2
    control_ok = control["slope"] > -0.05
    ok = main_ok and control_ok and runtime < 120
    criterion(6, ok, f"main ratio {main['median_ratio']:.3f} slope {main['slope']:.3f} "
                     f"[{'ok' if main_ok else 'fail'}]; control slope {control['slope']:.3f} "
                     f"(needs > -0.05) [{'ok' if control_ok else 'fail'}]; {runtime:.1f}s")
    assert main_ok, "main decay run failed"
    assert control_ok, "control run decays under censoring"


def test_c07_squares_heavy_tail(criterion):
    pareto_axes = {"kind": "product_om", "axes": [{"dist": {"kind": "pareto", "beta": 1.6}}] * 2}
    sq = run_lln_squares(dict(DECAY, id="c7", kind="lln_squares", model=pareto_axes), 0, 4)
    rect = run_lln_rectangles(dict(DECAY, id="c7-rect", kind="lln_rectangles", model=pareto_axes), 0, 4)
    norms = site_norms(model_from_json(pareto_axes), 200_000, 0)
    heavy = lpq_moment(norms, 1.5, 1)
    light = lpq_moment(site_norms(model_from_json(PRODUCT_RAD), 1000, 0), 1.5, 1)
    ok = (not sq["hypothesis_violating"]) and sq["median_ratio"] < 0.5 and sq["slope"] < -0.2
    criterion(7, ok, f"squares ratio {sq['median_ratio']:.3f} slope {sq['slope']:.3f}; "
                     f"rectangles ratio {rect['median_ratio']:.3f} (reported); "
                     f"lpq moment {heavy:.1f} vs {light:.2f} for signs")
    assert ok


def test_c08_burkholder_doob(criterion):
    signs = {"kind": "iid", "d": 1, "dist": RAD}
    one = check_burkholder({"id": "c8-1", "kind": "burkholder", "model": signs, "p": 1.5,
                            "horizons": [2 ** k for k in range(11)], "paths": 10_000,
                            "target": {"value": 1.0, "tol": 0.05}}, 0, 4)
    two = check_burkholder({"id": "c8-2", "kind": "burkholder", "model": PRODUCT_RAD, "p": 1.5,
                            "horizons": [1, 2, 4, 8, 16, 32], "paths": 1000}, 0, 4)
    dev = verdict(one, "burkholder_target")["value"]
    ok = dev <= 0.05 and two["slope"] is not None and two["slope"] <= 0.05
    criterion(8, ok, f"d=1 max |ratio - 1| {dev:.4f}; d=2 log-log slope {two['slope']:.4f}")
    assert ok


def test_c09_truncation_series(criterion):
    t0 = time.perf_counter()
    stable = True
    worst = 0.0
    for d, p, r in [(1, 1.5, 2.0), (2, 1.2, 2.0), (3, 1.5, 1.8)]:
        for row in check_truncation_series(d, p, r, lo=1e-3, hi=1e6):
            stable &= row.finite and row.stable
            worst = max(worst, row.relative_change)
    spot = float(lhs("B1", [0.5], 1, 1.5, 2.0)[0])
    err = abs(spot - 1 / (2 ** (1 / 3) - 1))
    runtime = time.perf_counter() - t0
    ok = stable and err <= 1e-9 and runtime < 10
    criterion(9, ok, f"15 ratios finite, max refinement change {worst:.1e}; "
                     f"B1 spot error {err:.1e}; {runtime:.1f}s")
    assert ok


def test_c10_bernoulli_bound_and_decay(criterion):
    model = {"kind": "bernoulli", "geometric": {"d": 2, "rho": 0.5, "K": 4}, "dist": RAD}
    rep = run_bernoulli_lln(dict(DECAY, id="c10", kind="bernoulli_lln", model=model,
                                 statistics=["rect_sup", "square_diag"]), 0, 4)
    const = verdict(rep, "delta_ratio_constant")
    finite = verdict(rep, "hypothesis_sum_finite")["passed"]
    rect = rep["statistics"]["rect_sup"]
    sq = rep["statistics"]["square_diag"]
    decay = rect["median_ratio"] < 0.5 and rect["slope"] < -0.2
    ok = const["passed"] and finite and decay
    criterion(10, ok, f"delta ratio spread {const['value']:.2f} se; hypothesis sum "
                      f"{rep['hypothesis_sum']:.3f}; rectangles ratio {rect['median_ratio']:.3f} "
                      f"slope {rect['slope']:.3f} [{'ok' if decay else 'fail'}]; squares ratio "
                      f"{sq['median_ratio']:.3f} slope {sq['slope']:.3f} (supplementary)")
    assert const["passed"] and finite
    assert decay, "rectangle decay of the dependent field is too slow at this horizon"


def test_c11_d0_detection(criterion):
    add = DShift((AxisFilter((1.0, 0.5)), AxisFilter((1.0,), InnovationDist.gaussian())), Link("sum"))
    prod = DShift((AxisFilter((1.0, 0.5)), AxisFilter((1.0,), InnovationDist.gaussian())), Link("product"))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NestedBiasWarning)
        d_add = detect_d0(add, 64, 3).d0
        d_prod = detect_d0(prod, 64, 3).d0
    additive = {"kind": "dshift", "axes": [{"coeffs": [1.0]}] * 2}
    base = {"id": "c11", "kind": "lln_squares", "model": additive, "p": 1.5,
            "horizons": [4, 16, 64, 256], "paths": 100, "expect": "decay"}
    pi = run_lln_squares(dict(base, normalization="pi"), 0, 4)
    plain = run_lln_squares(dict(base, normalization="plain"), 0, 4)
    ok = d_add == 1 and d_prod == 2 and pi["d0"] == 1 and pi["passed"] and not plain["passed"]
    criterion(11, ok, f"d0 additive {d_add}, product {d_prod}; pi slope {pi['slope']:.3f} "
                      f"[{'pass' if pi['passed'] else 'fail'}]; plain slope {plain['slope']:.3f} "
                      f"[{'pass' if plain['passed'] else 'fail'}]")
    assert ok


def test_c12_reproducible_reports(criterion, tmp_path):
    experiments = [
        dict(DECAY, id="rect", kind="lln_rectangles", model=PRODUCT_RAD),
        dict(DECAY, id="squares", kind="lln_squares", model=PRODUCT_RAD),
        dict(DECAY, id="lp", kind="lp_convergence", model=PRODUCT_RAD, paths=100),
        {"id": "maximal", "kind": "maximal_inequality", "p": 1.5, "horizons": [8, 16, 32],
         "paths": 100, "model": PRODUCT_RAD},
        {"id": "burk", "kind": "burkholder", "p": 1.5, "horizons": [1, 4, 16], "paths": 300,
         "model": PRODUCT_RAD},
        {"id": "bern", "kind": "bernoulli_lln", "p": 1.5, "horizons": [4, 16], "paths": 60,
         "delta_pairs": 300, "model": {"kind": "bernoulli", "geometric": {"d": 2, "rho": 0.5, "K": 1},
                                       "dist": RAD}},
        {"id": "blocks", "kind": "block_decomposition", "p": 1.5, "horizons": [6], "paths": 20,
         "replicates": 8, "model": {"kind": "bernoulli", "geometric": {"d": 2, "rho": 0.5, "K": 1},
                                    "dist": RAD}},
        {"id": "trunc", "kind": "truncation_series", "d": 2, "p": 1.2, "r": 2, "grid": {"points": 300}},
    ]
    cfg = {"schema_version": 1, "seed": 11, "experiments": experiments}
    outs = {}
    for w in (1, 4):
        out = tmp_path / f"w{w}"
        run_config(cfg, str(out), workers=w)
        outs[w] = {e["id"]: (out / f"{e['id']}.json").read_bytes() for e in experiments}
    same = [k for k in outs[1] if outs[1][k] == outs[4][k]]
    ok = len(same) == len(experiments)
    criterion(12, ok, f"{len(same)}/{len(experiments)} reports byte-identical at workers 1 and 4")
    assert ok
    json.loads(outs[1]["rect"])
