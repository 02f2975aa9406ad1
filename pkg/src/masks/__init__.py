"""Mask value types and operations.

Main exports:
    - BinaryMask, ProbMask, BBox: immutable grid value types
    - iou, dice: overlap scores
    - mean_masks, threshold: probability-map construction and voting primitive
    - bbox_of, cross_section, is_unimodal: geometry and profile analysis
    - largest_component_containing: component filter used by the segmenter
    - write_pgm / read_binary_pgm / read_prob_pgm: PGM artifacts
"""

from .types import BBox, BinaryMask, ProbMask
from .ops import (
    bbox_of,
    cross_section,
    dice,
    iou,
    is_connected,
    is_unimodal,
    label_components,
    largest_component_containing,
    mean_masks,
    threshold,
)
from .pgm import (
    decode_binary,
    decode_prob,
    encode_binary,
    encode_prob,
    read_binary_pgm,
    read_prob_pgm,
    write_pgm,
)

__all__ = [
    "BBox",
    "BinaryMask",
    "ProbMask",
    "bbox_of",
    "cross_section",
    "dice",
    "iou",
    "is_connected",
    "is_unimodal",
    "label_components",
    "largest_component_containing",
    "mean_masks",
    "threshold",
    "decode_binary",
    "decode_prob",
    "encode_binary",
    "encode_prob",
    "read_binary_pgm",
    "read_prob_pgm",
    "write_pgm",
]
