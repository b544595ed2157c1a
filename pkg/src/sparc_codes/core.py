"""Sparse regression codebooks: design matrices, codewords and exact search.

A codebook is an ``n x (M*L)`` Gaussian design matrix split into ``L``
sections of ``M`` columns.  A codeword picks one column per section, sums
them and scales by a common coefficient.  Patterns (one selected column
index per section) are plain integer arrays of length ``L``; bin indices
are integer arrays of the same length.

Column ``j`` of section ``l`` lives at flat index ``l * M + j``.
All indices are 0-based.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Optional, Sequence

import numpy as np

SEARCH_CAP_ENV = "SPARC_SEARCH_CAP"
DEFAULT_SEARCH_CAP = 10**8
DEFAULT_MATRIX_CAP = 10**8

# rows of partial residuals held in memory at once during search
_CHUNK_ROWS = 1 << 15


class CapacityError(RuntimeError):
    """Raised when a matrix or a search would exceed a configured size cap."""


def search_cap() -> int:
    """Pattern-visit cap for exhaustive search, honoring ``SPARC_SEARCH_CAP``."""
    raw = os.environ.get(SEARCH_CAP_ENV)
    if raw is None:
        return DEFAULT_SEARCH_CAP
    try:
        cap = int(float(raw))
    except ValueError:
        raise ValueError(f"{SEARCH_CAP_ENV} must be an integer, got {raw!r}")
    if cap < 1:
        raise ValueError(f"{SEARCH_CAP_ENV} must be >= 1, got {cap}")
    return cap


@dataclass(frozen=True)
class SparcLayout:
    """Dimensions of a SPARC codebook.

    Parameters
    ----------
    n : int
        Block length.
    M : int
        Columns per section.
    L : int
        Number of sections.
    coeff : float, default=1.0
        Common value of the non-zero coefficients.
    """

    n: int
    M: int
    L: int
    coeff: float = 1.0

    def __post_init__(self):
        for name in ("n", "M", "L"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise TypeError(f"{name} must be an integer, got {value!r}")
            if value < 1:
                raise ValueError(f"layout requires {name} >= 1, got {value}")
            object.__setattr__(self, name, int(value))
        if not np.isfinite(self.coeff) or self.coeff <= 0:
            raise ValueError(f"layout requires coeff > 0, got {self.coeff}")
        object.__setattr__(self, "coeff", float(self.coeff))

    @property
    def rate(self) -> float:
        """Realized rate ``L ln M / n`` in nats per sample."""
        return self.L * math.log(self.M) / self.n

    @property
    def n_codewords(self) -> int:
        return self.M**self.L

    @property
    def n_columns(self) -> int:
        return self.M * self.L

    def with_coeff(self, coeff: float) -> "SparcLayout":
        return SparcLayout(self.n, self.M, self.L, coeff)


@dataclass(frozen=True)
class NestedLayout:
    """A layout whose sections are cut into subsections of ``m_prime`` columns.

    Choosing one subsection per section defines a bin; each bin is itself a
    SPARC with ``m_prime ** L`` codewords.
    """

    base: SparcLayout
    m_prime: int

    def __post_init__(self):
        mp = self.m_prime
        if isinstance(mp, bool) or not isinstance(mp, (int, np.integer)):
            raise TypeError(f"m_prime must be an integer, got {mp!r}")
        mp = int(mp)
        if not 1 <= mp <= self.base.M:
            raise ValueError(f"nesting requires 1 <= M' <= M, got M'={mp}, M={self.base.M}")
        if self.base.M % mp:
            raise ValueError(f"nesting requires M' to divide M, got M'={mp}, M={self.base.M}")
        object.__setattr__(self, "m_prime", mp)

    @property
    def n_subsections(self) -> int:
        """Subsections per section, ``M / M'``."""
        return self.base.M // self.m_prime

    @property
    def n_bins(self) -> int:
        return self.n_subsections**self.base.L

    @property
    def outer_rate(self) -> float:
        return self.base.rate

    @property
    def inner_rate(self) -> float:
        return self.base.L * math.log(self.m_prime) / self.base.n

    @property
    def bin_rate(self) -> float:
        """Rate needed to describe a bin, ``(L/n) ln(M/M')``."""
        return self.base.L * math.log(self.n_subsections) / self.base.n


@dataclass(frozen=True)
class DesignMatrix:
    """Gaussian design matrix together with the (layout, seed) that defines it.

    Entries are read-only.  Use :func:`sample_design_matrix` to build one.
    """

    layout: SparcLayout
    seed: int
    entries: np.ndarray = field(repr=False, compare=False)

    def column(self, section: int, j: int) -> np.ndarray:
        return self.entries[:, section * self.layout.M + j]

    def section(self, section: int) -> np.ndarray:
        M = self.layout.M
        return self.entries[:, section * M : (section + 1) * M]

    def with_coeff(self, coeff: float) -> "DesignMatrix":
        """Same entries under a layout with a different coefficient."""
        return DesignMatrix(self.layout.with_coeff(coeff), self.seed, self.entries)


def _check_seed(seed) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {seed!r}")
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must lie in [0, 2**64), got {seed}")
    return seed


def column_entries(seed: int, section: int, j: int, n: int) -> np.ndarray:
    """The ``n`` entries of column ``(section, j)`` for a given matrix seed.

    Each column has its own generator keyed on ``(seed, section, j)``, so any
    column or sub-matrix can be regenerated without building the rest.
    """
    rng = np.random.default_rng(np.random.SeedSequence([seed, section, j]))
    return rng.standard_normal(n)


def sample_design_matrix(
    layout: SparcLayout, seed: int, max_entries: int = DEFAULT_MATRIX_CAP
) -> DesignMatrix:
    """Draw an i.i.d. N(0, 1) design matrix for ``layout``.

    Raises
    ------
    CapacityError
        If ``n * M * L`` exceeds ``max_entries``.
    """
    if not isinstance(layout, SparcLayout):
        raise TypeError("layout must be a SparcLayout")
    seed = _check_seed(seed)
    size = layout.n * layout.n_columns
    if size > max_entries:
        raise CapacityError(
            f"design matrix has {size} entries, above the cap of {max_entries}"
        )
    entries = np.empty((layout.n, layout.n_columns))
    for sec in range(layout.L):
        for j in range(layout.M):
            entries[:, sec * layout.M + j] = column_entries(seed, sec, j, layout.n)
    entries.flags.writeable = False
    return DesignMatrix(layout, seed, entries)


def check_pattern(pattern, layout: SparcLayout, name: str = "pattern") -> np.ndarray:
    """Validate a pattern (one column index per section) against ``layout``."""
    p = np.asarray(pattern)
    if p.ndim != 1 or p.shape[0] != layout.L:
        raise ValueError(f"{name} must have exactly L={layout.L} entries, got shape {p.shape}")
    if p.size and not np.issubdtype(p.dtype, np.integer):
        if not np.all(np.mod(p, 1) == 0):
            raise ValueError(f"{name} entries must be integers")
    p = p.astype(np.intp)
    if np.any(p < 0) or np.any(p >= layout.M):
        raise ValueError(f"{name} entries must lie in [0, M={layout.M})")
    return p


def check_bin(bin_index, nest: NestedLayout, name: str = "bin index") -> np.ndarray:
    b = np.asarray(bin_index)
    L = nest.base.L
    if b.ndim != 1 or b.shape[0] != L:
        raise ValueError(f"{name} must have exactly L={L} entries, got shape {b.shape}")
    b = b.astype(np.intp)
    if np.any(b < 0) or np.any(b >= nest.n_subsections):
        raise ValueError(f"{name} entries must lie in [0, M/M'={nest.n_subsections})")
    return b


def flat_columns(pattern: np.ndarray, M: int) -> np.ndarray:
    return np.arange(len(pattern)) * M + pattern


def synthesize_codeword(A: DesignMatrix, pattern) -> np.ndarray:
    """Codeword ``coeff * sum_l A[:, l*M + pattern[l]]``."""
    p = check_pattern(pattern, A.layout)
    cols = A.entries[:, flat_columns(p, A.layout.M)]
    return A.layout.coeff * cols.sum(axis=1)


def bin_of(pattern, nest: NestedLayout) -> np.ndarray:
    """Subsection holding each section's selected column, ``floor(j / M')``."""
    p = check_pattern(pattern, nest.base)
    return p // nest.m_prime


def allowed_columns(layout: SparcLayout, restriction=None) -> list:
    """Admissible column indices per section, each in increasing order.

    ``restriction`` is ``None`` or a ``(NestedLayout, bin_index)`` pair.
    """
    if restriction is None:
        return [np.arange(layout.M)] * layout.L
    nest, bin_index = restriction
    if nest.base.M != layout.M or nest.base.L != layout.L:
        raise ValueError("restriction's nested layout does not match the codebook layout")
    b = check_bin(bin_index, nest)
    mp = nest.m_prime
    return [np.arange(p * mp, (p + 1) * mp) for p in b]


def enumerate_patterns(
    layout: SparcLayout, restriction=None, cap: Optional[int] = None
) -> Iterator[np.ndarray]:
    """Yield every admissible pattern once, in lexicographic order."""
    allowed = allowed_columns(layout, restriction)
    total = math.prod(len(a) for a in allowed)
    cap = search_cap() if cap is None else cap
    if total > cap:
        raise CapacityError(f"enumeration of {total} patterns exceeds the cap of {cap}")
    for combo in itertools.product(*allowed):
        yield np.array(combo, dtype=np.intp)


def _residual_blocks(target, weighted, allowed):
    """Depth-first expansion of residuals ``target - sum of chosen columns``.

    Yields ``(prefix_patterns, residuals)`` for the last section, with rows in
    lexicographic order.  Partial sums of earlier sections are shared by all
    their descendants.
    """
    n = target.shape[0]
    last = len(allowed) - 1

    def expand(level, prefix, residual):
        if level == last:
            yield prefix, residual
            return
        cols = weighted[level]  # (m, n)
        m = cols.shape[0]
        step = max(1, _CHUNK_ROWS // m)
        for start in range(0, residual.shape[0], step):
            r = residual[start : start + step]
            p = prefix[start : start + step]
            new_r = (r[:, None, :] - cols[None, :, :]).reshape(-1, n)
            new_p = np.concatenate(
                [np.repeat(p, m, axis=0), np.tile(allowed[level], len(p))[:, None]], axis=1
            )
            yield from expand(level + 1, new_p, new_r)

    yield from expand(0, np.empty((1, 0), dtype=np.intp), target[None, :])


def nearest_codeword(
    A: DesignMatrix,
    target,
    scale: float = 1.0,
    restriction=None,
    cap: Optional[int] = None,
) -> np.ndarray:
    """Exact minimizer of ``||target - scale * A beta||^2`` over patterns.

    Parameters
    ----------
    A : DesignMatrix
    target : array-like of shape (n,)
    scale : float, default=1.0
        Multiplier applied to every codeword before measuring distance.
    restriction : tuple (NestedLayout, bin_index), optional
        Limit the search to patterns whose selections fall in the given bin.
    cap : int, optional
        Maximum number of patterns visited; defaults to :func:`search_cap`.

    Returns
    -------
    pattern : ndarray of shape (L,)
        The minimizer.  Exact ties go to the lexicographically smallest
        pattern.

    Raises
    ------
    CapacityError
        If the number of admissible patterns exceeds ``cap``.
    """
    layout = A.layout
    t = np.asarray(target, dtype=float)
    if t.shape != (layout.n,):
        raise ValueError(f"target must have shape ({layout.n},), got {t.shape}")
    if not np.isfinite(scale):
        raise ValueError("scale must be finite")
    allowed = allowed_columns(layout, restriction)
    total = math.prod(len(a) for a in allowed)
    cap = search_cap() if cap is None else cap
    if total > cap:
        raise CapacityError(
            f"search over {total} patterns exceeds the cap of {cap}; "
            "restrict the search or use a smaller layout"
        )

    w = scale * layout.coeff
    weighted = [
        w * A.entries[:, sec * layout.M + cols].T for sec, cols in enumerate(allowed)
    ]
    last_cols = weighted[-1]
    last_idx = allowed[-1]

    best = np.inf
    candidates = []  # (pattern rows, distances) within tolerance of the running best
    for prefix, residual in _residual_blocks(t, weighted, allowed):
        diff = residual[:, None, :] - last_cols[None, :, :]
        dist = np.einsum("ijk,ijk->ij", diff, diff).ravel()
        block_min = dist.min()
        best = min(best, block_min)
        tol = 1e-9 * max(1.0, best)
        keep = np.flatnonzero(dist <= block_min + 1e-9 * max(1.0, block_min))
        m = len(last_idx)
        rows = np.concatenate(
            [prefix[keep // m], last_idx[keep % m][:, None]], axis=1
        )
        candidates.append((rows, dist[keep]))
        candidates = [(r, d) for r, d in candidates if d.min() <= best + tol]

    tol = 1e-9 * max(1.0, best)
    near = np.concatenate([r[d <= best + tol] for r, d in candidates])
    if len(near) == 1:
        return near[0]
    # resolve near-ties on a single canonical distance formula
    exact = [float(np.sum((t - scale * synthesize_codeword(A, p)) ** 2)) for p in near]
    lowest = min(exact)
    tied = [tuple(p) for p, e in zip(near, exact) if e == lowest]
    return np.array(min(tied), dtype=np.intp)


class LayoutChoice(NamedTuple):
    n: int
    M: int
    L: int
    rate: float


def solve_layout(n: int, R: float, b: float) -> LayoutChoice:
    """Pick ``L`` with ``L ln L`` closest to ``n R / b`` and ``M = round(L ** b)``.

    Ties in ``|L ln L - nR/b|`` go to the smaller ``L``.  The realized rate
    ``L ln M / n`` is returned alongside; the coefficient is left to the
    caller because it depends on the scheme.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not R > 0:
        raise ValueError(f"R must be > 0, got {R}")
    if not b > 1:
        raise ValueError(f"b must be > 1, got {b}")
    goal = n * R / b
    # L ln L is increasing for L >= 1, so stop at the first L past the goal
    best_L, best_gap = 1, abs(goal)
    L = 1
    while True:
        L += 1
        gap = abs(L * math.log(L) - goal)
        if gap < best_gap:
            best_L, best_gap = L, gap
        if L * math.log(L) >= goal:
            break
    M = max(1, int(round(best_L**b)))
    return LayoutChoice(n, M, best_L, best_L * math.log(M) / n)


def bin_from_message(message: int, nest: NestedLayout) -> np.ndarray:
    """Mixed-radix digits of ``message`` in base ``M/M'``, section 0 first."""
    q = nest.n_subsections
    if isinstance(message, bool) or not isinstance(message, (int, np.integer)):
        raise TypeError(f"message must be an integer, got {message!r}")
    if not 0 <= message < nest.n_bins:
        raise ValueError(f"message must lie in [0, {nest.n_bins})")
    digits = np.zeros(nest.base.L, dtype=np.intp)
    m = int(message)
    for sec in range(nest.base.L - 1, -1, -1):
        m, digits[sec] = divmod(m, q)
    return digits


def message_from_bin(bin_index: Sequence[int], nest: NestedLayout) -> int:
    b = check_bin(bin_index, nest)
    m = 0
    for digit in b:
        m = m * nest.n_subsections + int(digit)
    return m
