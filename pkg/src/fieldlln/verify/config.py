"""Experiment configuration: JSON schema, validation and budget planning."""

import json

import jsonschema

from ..grid import Rect
from ..models.sampling import MemoryBudgetError, memory_cap, required_bytes
from ..models.serialize import MODEL_KINDS, model_from_json
from .common import CHUNK

SCHEMA_VERSION = 1

EXPERIMENT_KINDS = {
    "lln_rectangles": "Marcinkiewicz strong law on rectangles (censored sup over max n >= N)",
    "lln_squares": "strong law along the diagonal n1 (censored sup over n >= N)",
    "lp_convergence": "L^p law for the normalized maximum, single-axis and diagonal regimes",
    "maximal_inequality": "weak-L^p maximal inequality against the L^p(log L)^{d-1} moment",
    "burkholder": "Burkholder moment bound and Doob maximal ratio for orthomartingales",
    "bernoulli_lln": "coupling coefficients, Hölder bound and decay for Bernoulli shifts",
    "block_decomposition": "triangle bound over congruence classes of m-dependent components",
    "mdep_bound": "component norm against the shell of coupling coefficients",
    "truncation_series": "deterministic series bounds for truncated variables",
}

_pos_int = {"type": "integer", "minimum": 1}
_horizons = {"type": "array", "items": _pos_int, "minItems": 1, "uniqueItems": True}
_thresholds = {
    "type": "object", "additionalProperties": False,
    "properties": {"ratio": {"type": "number"}, "slope": {"type": "number"},
                   "no_decay_slope": {"type": "number"}},
}

EXPERIMENT_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["id", "kind"],
    "properties": {
        "id": {"type": "string", "pattern": "^[A-Za-z0-9_.-]+$"},
        "kind": {"enum": sorted(EXPERIMENT_KINDS)},
        "model": {"type": "object", "required": ["kind"],
                  "properties": {"kind": {"enum": list(MODEL_KINDS)}}},
        "p": {"type": "number", "exclusiveMinimum": 1},
        "q": {"type": "number", "minimum": 0},
        "r": {"type": "number", "exclusiveMinimum": 1},
        "d": {"type": "integer", "minimum": 1, "maximum": 3},
        "horizons": _horizons,
        "paths": _pos_int,
        "seed": {"type": "integer", "minimum": 0},
        "expect": {"enum": ["auto", "decay", "no_decay", "none"]},
        "censor": _pos_int,
        "normalization": {"enum": ["plain", "pi", "auto"]},
        "d0": {"type": "integer", "minimum": 0, "maximum": 3},
        "d0_replicates": _pos_int,
        "d0_outer": _pos_int,
        "thresholds": _thresholds,
        "regimes": {"type": "array", "items": {"enum": ["single", "diagonal"]}, "minItems": 1},
        "statistics": {"type": "array", "items": {"enum": ["rect_sup", "square_diag", "lp_max"]}},
        "delta_pairs": _pos_int,
        "site_samples": _pos_int,
        "replicates": _pos_int,
        "m_levels": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1},
        "target": {"type": "object", "additionalProperties": False, "required": ["value", "tol"],
                   "properties": {"value": {"type": "number"}, "tol": {"type": "number", "minimum": 0}}},
        "distribution": {"type": "object", "additionalProperties": False, "required": ["values", "probs"],
                         "properties": {"values": {"type": "array", "items": {"type": "number", "minimum": 0}},
                                        "probs": {"type": "array", "items": {"type": "number", "minimum": 0}}}},
        "grid": {"type": "object", "additionalProperties": False,
                 "properties": {"lo": {"type": "number", "exclusiveMinimum": 0},
                                "hi": {"type": "number", "exclusiveMinimum": 0},
                                "points": {"type": "integer", "minimum": 2}}},
    },
    "allOf": [
        {"if": {"properties": {"kind": {"const": "truncation_series"}}},
         "then": {"required": ["d", "p", "r"]},
         "else": {"required": ["model", "p", "horizons", "paths"]}},
    ],
}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["schema_version", "experiments"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "seed": {"type": "integer", "minimum": 0},
        "experiments": {"type": "array", "items": EXPERIMENT_SCHEMA},
    },
}


class ConfigError(ValueError):
    """Invalid configuration; ``errors`` lists (json pointer, message)."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(f"{ptr or '/'}: {msg}" for ptr, msg in self.errors))


def pointer(path):
    return "".join("/" + str(p).replace("~", "~0").replace("/", "~1") for p in path)


def validate(cfg):
    """Schema check, duplicate ids and model construction.  Raises ConfigError."""
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(cfg), key=lambda e: list(e.absolute_path))
    if errors:
        raise ConfigError((pointer(e.absolute_path), e.message) for e in errors)
    seen, problems = set(), []
    for j, exp in enumerate(cfg["experiments"]):
        if exp["id"] in seen:
            problems.append((f"/experiments/{j}/id", f"duplicate experiment id {exp['id']!r}"))
        seen.add(exp["id"])
        if "model" in exp:
            try:
                model_from_json(exp["model"])
            except (KeyError, TypeError, ValueError) as err:
                problems.append((f"/experiments/{j}/model", f"{type(err).__name__}: {err}"))
    if problems:
        raise ConfigError(problems)
    return cfg


def load(path):
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as err:
        raise ConfigError([("", f"invalid JSON: {err}")]) from None
    return validate(cfg)


def experiment_seed(cfg, exp, override=None):
    """Seed priority: command-line override, then experiment, then top level, then 0."""
    if override is not None:
        return int(override)
    return int(exp.get("seed", cfg.get("seed", 0)))


def regions(exp):
    """Simulated regions of one experiment, for budget arithmetic."""
    if exp["kind"] == "truncation_series":
        return None, []
    model = model_from_json(exp["model"])
    d = model.d
    top = max(exp["horizons"])
    kind = exp["kind"]
    if kind in ("lln_rectangles", "lln_squares", "bernoulli_lln"):
        side = exp.get("censor") or top
        return model, [Rect.cube(side, d)]
    if kind == "lp_convergence":
        return model, [Rect.from_sides((top,) + (2,) * (d - 1)), Rect.cube(top, d)]
    if kind == "mdep_bound":
        return model, [Rect.cube(1, d)]
    return model, [Rect.cube(top, d)]


def budget(exp, cap=None):
    """Memory and sample-count plan for one experiment, computed without sampling."""
    cap = memory_cap() if cap is None else cap
    model, regs = regions(exp)
    if model is None:
        return {"bytes": 0, "cap": cap, "ok": True, "samples": 0, "region": None}
    paths = int(exp["paths"])
    chunk = min(CHUNK, paths)
    if exp["kind"] in ("block_decomposition", "mdep_bound"):
        # all realizations at once, one replicate row per outer offset
        outer = (2 * model.window + 1) ** model.d
        need = max(8 * paths * r.volume * int(exp.get("replicates", 64)) * outer * model.m
                   for r in regs)
    else:
        need = max(3 * required_bytes(model, r, 1) for r in regs)
    samples = sum(paths * r.volume for r in regs)
    return {"bytes": int(need), "cap": int(cap), "ok": bool(need <= cap),
            "samples": int(samples), "region": [list(regs[-1].shape)], "paths_per_batch": chunk}


def check_budgets(cfg, cap=None):
    """Raise MemoryBudgetError naming the first experiment whose single path exceeds the cap."""
    for exp in cfg["experiments"]:
        b = budget(exp, cap)
        if not b["ok"]:
            raise MemoryBudgetError(b["bytes"], b["cap"])
