"""Input checks shared by the codec estimators."""

from __future__ import annotations

import math

import numpy as np
from sklearn.utils.validation import check_array

from .core import SparcLayout, NestedLayout, check_bin, check_pattern


def check_blocks(X, n: int, name: str = "X") -> np.ndarray:
    """Return ``X`` as a float array of shape (n_blocks, n)."""
    X = check_array(X, dtype=np.float64, ensure_2d=True, input_name=name)
    if X.shape[1] != n:
        raise ValueError(f"{name} has {X.shape[1]} samples per block, expected n={n}")
    return X


def check_patterns(P, layout: SparcLayout, name: str = "patterns") -> np.ndarray:
    P = np.asarray(P)
    if P.ndim != 2:
        raise ValueError(f"{name} must be 2-D (n_blocks, L), got shape {P.shape}")
    return np.stack([check_pattern(p, layout, name) for p in P]) if len(P) else P.astype(np.intp)


def check_bins(B, nest: NestedLayout, name: str = "bins") -> np.ndarray:
    B = np.asarray(B)
    if B.ndim != 2:
        raise ValueError(f"{name} must be 2-D (n_blocks, L), got shape {B.shape}")
    return np.stack([check_bin(b, nest, name) for b in B]) if len(B) else B.astype(np.intp)


def check_same_blocks(A: np.ndarray, B: np.ndarray, names=("first", "second")):
    if A.shape[0] != B.shape[0]:
        raise ValueError(
            f"{names[0]} and {names[1]} hold different numbers of blocks: "
            f"{A.shape[0]} != {B.shape[0]}"
        )


def check_positive(name: str, value) -> float:
    value = float(value)
    if not (value > 0 and math.isfinite(value)):
        raise ValueError(f"{name} must be > 0, got {value}")
    return value


def check_nonnegative(name: str, value) -> float:
    value = float(value)
    if not (value >= 0 and math.isfinite(value)):
        raise ValueError(f"{name} must be >= 0, got {value}")
    return value


def check_count(name: str, value) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise TypeError(f"{name} must be an integer, got {value!r}")
    if value < 1:
        raise ValueError(f"{name} must be >= 1, got {value}")
    return int(value)
