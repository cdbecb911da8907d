"""Random-field generators and their realizations."""

from .distributions import InnovationDist
from .fields import (
    IID, AxisFilter, AxisMDS, BernoulliField, DShift, FieldModel, ProductOM, Redraw,
    geometric_coefficients, geometric_linear_field, geometric_tail_mass,
)
from .links import Link
from .mdep import (
    BlockClass, MDepApprox, ReplicateError, block_decompose, mdep_component,
    mdep_values,
)
from .sampling import (
    FieldTensor, MemoryBudgetError, check_budget, model_id, orthomartingale_from_products,
    required_bytes, resample_at, resample_axis_at, sample_field,
)
from .serialize import model_from_json, model_to_json

__all__ = [
    "AxisFilter", "AxisMDS", "BernoulliField", "BlockClass", "DShift", "FieldModel",
    "FieldTensor", "IID", "InnovationDist", "Link", "MDepApprox", "MemoryBudgetError",
    "ProductOM", "Redraw", "ReplicateError", "block_decompose", "check_budget",
    "geometric_coefficients", "geometric_linear_field", "geometric_tail_mass", "mdep_component",
    "mdep_values", "model_from_json", "model_id", "model_to_json",
    "orthomartingale_from_products", "required_bytes", "resample_at", "resample_axis_at",
    "sample_field",
]
