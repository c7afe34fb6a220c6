"""Arbitrary-precision natural numbers with Karatsuba multiplication,
Mulders partial products and Newton-inverse division."""

from .divengine import (DivResult, DivThresholds, divide, divide_block_short,
                        divide_classical, divide_fast)
from .mulengine import MulThresholds, mul, mul_classical, mul_karatsuba, workspace_bound
from .natural import (Natural, UnderflowError, Workspace, WorkspaceExhausted, add,
                      branch_free_select, compare, from_decimal, leading_zero_bits,
                      shift_left_bits, shift_right_bits, sub, sub_signed, to_decimal)
from .shinv import (PrecisionSchedule, ShiftedInverse, initial_inverse, normalize, refine,
                    shifted_inverse)
from .sliceprod import (MuldersConfig, ProductSlice, SliceRequest, middle_product,
                        product_digit_at_bit, slice_classical, slice_mulders)

__version__ = "0.1.0"

__all__ = [
    "DivResult", "DivThresholds", "divide", "divide_block_short", "divide_classical",
    "divide_fast", "MulThresholds", "mul", "mul_classical", "mul_karatsuba",
    "workspace_bound", "Natural", "UnderflowError", "Workspace", "WorkspaceExhausted",
    "add", "branch_free_select", "compare", "from_decimal", "leading_zero_bits",
    "shift_left_bits", "shift_right_bits", "sub", "sub_signed", "to_decimal",
    "PrecisionSchedule", "ShiftedInverse", "initial_inverse", "normalize", "refine",
    "shifted_inverse", "MuldersConfig", "ProductSlice", "SliceRequest",
    "middle_product", "product_digit_at_bit", "slice_classical", "slice_mulders",
]
