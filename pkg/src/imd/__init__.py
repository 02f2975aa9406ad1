"""Iterative mask denoising: segmenter, voting and the outer loop.

Main exports:
    - SegmenterKind, segment: the segmentation stage S
    - VotingStrategy, fuse: the voting stage V
    - IMDConfig, IMDTrace, imd_step, run_imd: the denoising loop
    - seed_derive: deterministic per-(step, sample) seeds
    - export_trace: PGM/CSV/JSON artifacts of a run
"""

from .seeds import derived_rng, seed_derive, splitmix64
from .segmenter import SegmenterKind, perturb_boundary, segment
from .voting import VotingStrategy, fuse
from .engine import Generator, IMDConfig, IMDTrace, StepRecord, imd_step, run_imd, score_trace, summarize
from .export import TRACE_COLUMNS, export_trace, write_trace_csv

__all__ = [
    "derived_rng",
    "seed_derive",
    "splitmix64",
    "SegmenterKind",
    "perturb_boundary",
    "segment",
    "VotingStrategy",
    "fuse",
    "Generator",
    "IMDConfig",
    "IMDTrace",
    "StepRecord",
    "imd_step",
    "run_imd",
    "score_trace",
    "summarize",
    "TRACE_COLUMNS",
    "export_trace",
    "write_trace_csv",
]
