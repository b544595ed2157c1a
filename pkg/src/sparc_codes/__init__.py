"""Sparse regression codes with exact minimum-distance coding, binning and superposition."""

from .core import (
    CapacityError,
    DesignMatrix,
    LayoutChoice,
    NestedLayout,
    SparcLayout,
    bin_from_message,
    bin_of,
    enumerate_patterns,
    message_from_bin,
    nearest_codeword,
    sample_design_matrix,
    solve_layout,
    synthesize_codeword,
)
from .harness import ExperimentConfig, TrialStats, parse_stats, run_experiment, serialize_stats
from .multiterminal import BroadcastCode, DirtyPaperCode, MacCornerCode, WynerZivCode
from .p2p import SparcChannelCode, SparcQuantizer, awgn, distortion

__version__ = "0.1.0"

__all__ = [
    "BroadcastCode",
    "CapacityError",
    "DesignMatrix",
    "DirtyPaperCode",
    "ExperimentConfig",
    "LayoutChoice",
    "MacCornerCode",
    "NestedLayout",
    "SparcChannelCode",
    "SparcLayout",
    "SparcQuantizer",
    "TrialStats",
    "WynerZivCode",
    "awgn",
    "bin_from_message",
    "bin_of",
    "distortion",
    "enumerate_patterns",
    "message_from_bin",
    "nearest_codeword",
    "parse_stats",
    "run_experiment",
    "sample_design_matrix",
    "serialize_stats",
    "solve_layout",
    "synthesize_codeword",
]
