"""Exact Independent Chip Model computations and fair-bet analysis."""

from icm.core import (
    EXACT,
    FLOAT,
    CapacityError,
    ChipStacks,
    DomainError,
    FinishMatrix,
    ICMError,
    NumericMode,
    PayoutStructure,
    decompose_payouts,
    equity,
    finish_matrix,
    joint_order_prob,
)

__all__ = [
    "EXACT",
    "FLOAT",
    "CapacityError",
    "ChipStacks",
    "DomainError",
    "FinishMatrix",
    "ICMError",
    "NumericMode",
    "PayoutStructure",
    "decompose_payouts",
    "equity",
    "finish_matrix",
    "joint_order_prob",
]
