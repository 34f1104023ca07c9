from .shamir import (
    FIXED_SCALE_BITS,
    MaskSecret,
    ShareBundle,
    new_mask,
    reconstruct_sum,
    split_secret,
    sum_local_shares,
)
from .aggregate import MaskDegenerateError, MaskedUpdate, aggregate_masked, mask_update

__all__ = [
    "FIXED_SCALE_BITS",
    "MaskSecret",
    "ShareBundle",
    "new_mask",
    "split_secret",
    "sum_local_shares",
    "reconstruct_sum",
    "MaskedUpdate",
    "mask_update",
    "aggregate_masked",
    "MaskDegenerateError",
]
