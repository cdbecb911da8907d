"""Censored sup statistics on growing horizons for three fields.

Rectangles and squares for a product of independent signs, squares for
a heavy-tailed product, and an i.i.d. field whose tail index is below p.
Run: python3 demos/lln_decay.py
"""

from fieldlln.verify import run_lln_rectangles, run_lln_squares

SIGNS = {"kind": "product_om", "axes": [{"dist": {"kind": "rademacher"}}] * 2}
HEAVY = {"kind": "product_om", "axes": [{"dist": {"kind": "pareto", "beta": 1.6}}] * 2}
CONTROL = {"kind": "iid", "d": 2, "dist": {"kind": "pareto", "beta": 1.2}}

base = {"p": 1.5, "horizons": [4, 16, 64], "paths": 200}
runs = [
    ("signs, rectangles", run_lln_rectangles, SIGNS),
    ("signs, squares", run_lln_squares, SIGNS),
    ("pareto 1.6 product, squares", run_lln_squares, HEAVY),
    ("pareto 1.2 iid, rectangles", run_lln_rectangles, CONTROL),
]

print(f"{'run':32s} {'N=4':>8s} {'N=16':>8s} {'N=64':>8s} {'slope':>8s}  expect")
for label, runner, model in runs:
    rep = runner(dict(base, id=label, kind="demo", model=model), seed=0, workers=4)
    med = [row["median"] for row in rep["table"]]
    print(f"{label:32s} {med[0]:8.3f} {med[1]:8.3f} {med[2]:8.3f} {rep['slope']:8.3f}  "
          f"{rep['expect']} -> {'pass' if rep['passed'] else 'FAIL'}")

# the control is censored at the region, so it cannot increase with N either
