"""Experiment harness: LLN decay runs, inequality constants and series bounds."""

from .bernoulli import hypothesis_sum, run_bernoulli_lln
from .blocks import check_block_decomposition, run_block_decomposition, run_mdep_bound
from .common import Verdict, dumps
from .config import CONFIG_SCHEMA, EXPERIMENT_KINDS, ConfigError, budget, load, validate
from .inequalities import check_burkholder, check_maximal_inequality
from .lln import run_lln_rectangles, run_lln_squares, run_lp_convergence
from .runner import describe, run_config, run_experiment
from .truncation import check_truncation_series

__all__ = [
    "CONFIG_SCHEMA", "ConfigError", "EXPERIMENT_KINDS", "Verdict", "budget",
    "check_block_decomposition", "check_burkholder", "check_maximal_inequality",
    "check_truncation_series", "describe", "dumps", "hypothesis_sum", "load",
    "run_bernoulli_lln", "run_block_decomposition", "run_config", "run_experiment",
    "run_lln_rectangles", "run_lln_squares", "run_lp_convergence", "run_mdep_bound", "validate",
]
