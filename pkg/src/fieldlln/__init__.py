"""Monte Carlo checks of Marcinkiewicz laws of large numbers for random fields on Z^d.

Subpackages
-----------
models
    Innovation laws, field generators and realized tensors.
verify
    Experiment harness, configuration schema and report writers.

Modules ``grid``, ``sums``, ``norms`` and ``dependence`` hold the lattice
arithmetic, summed-area tables, Orlicz and weak norms, and the dependence
diagnostics.
"""

from .grid import Rect, pi_normalizer
from .norms import NormSpec, luxemburg_norm, lp_norm, weak_lp_norm
from .space import EUCLIDEAN, VecNorm
from .sums import PrefixTable, build_prefix, rect_sum, sup_tail_statistic

__version__ = "0.1.0"

__all__ = [
    "EUCLIDEAN", "NormSpec", "PrefixTable", "Rect", "VecNorm", "build_prefix", "lp_norm",
    "luxemburg_norm", "pi_normalizer", "rect_sum", "sup_tail_statistic", "weak_lp_norm",
]
