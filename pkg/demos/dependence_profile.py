"""Coupling coefficients of a linear field and the d0 of two axis-built fields.

Run: python3 demos/dependence_profile.py
"""

import warnings

from fieldlln.dependence import NestedBiasWarning, delta_profile, detect_d0
from fieldlln.models import AxisFilter, DShift, InnovationDist, Link, geometric_linear_field
from fieldlln.norms import NormSpec
from fieldlln.verify import hypothesis_sum

warnings.simplefilter("ignore", NestedBiasWarning)

field = geometric_linear_field(2, 0.5, 3)
spec = NormSpec.orlicz(1.5, 1.0)
lags = [(k, 0) for k in range(5)] + [(k, k) for k in range(1, 4)]
prof = delta_profile(field, lags, spec, 4000, seed=1)

print("lag      delta    stderr   delta/rho^|k|")
for k in lags:
    e = prof.entries[k]
    print(f"{str(k):8s} {e.value:7.4f}  {e.stderr:7.4f}  {e.value / 0.5 ** max(map(abs, k)):7.4f}")

full = delta_profile(field, [(i, j) for i in range(-3, 4) for j in range(-3, 4)], spec, 2000, seed=2)
deltas = {k: e.value for k, e in full.entries.items()}
print(f"shell-weighted sum over the window: {hypothesis_sum(deltas, 2, 1.5):.4f}")

# d0: smallest set of axes carrying a nonzero component
for name in ("sum", "product"):
    ds = DShift((AxisFilter((1.0, 0.5)), AxisFilter((1.0,), InnovationDist.gaussian())), Link(name))
    res = detect_d0(ds, 64, seed=3)
    print(f"{name:8s} link: d0 = {res.d0}")
