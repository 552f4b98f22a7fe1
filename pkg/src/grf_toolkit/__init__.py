"""Metadata-driven Gaussian random field images for multimodal segmentation.

Encodes patient metadata as deterministic GRF images, fuses them with RGB
wound images into 4-channel tensors, merges mask ensembles through signed
distance transforms and scores predictions with IoU/DSC/FPE/FNE.
"""
__version__ = "0.1.0"

from ._backend import BACKEND  # noqa: E402
from .grfgen import (  # noqa: E402
    GrfParams,
    category_seed,
    field_to_greyscale,
    frequency_grid,
    grf_for_record,
    power_exponent,
    radial_power_spectrum,
    synthesize_field,
)
from .maskfusion import average_merge, distance_transform, signed_distance  # noqa: E402
from .metrics import confusion, dsc, evaluate_dataset, fne, fpe, iou  # noqa: E402
from .tensorfuse import merge_rgb_grf  # noqa: E402
