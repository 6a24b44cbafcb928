"""Short- and long-range spectral fluctuation measures.

All measures operate on :class:`~billiardlab.unfolding.UnfoldedSpectrum`
objects, i.e. on levels rescaled to unit mean spacing.  Long-range
statistics average over overlapping windows sliding in steps of L/4
within each complete sequence and then across sequences.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, QualityWarning
from .unfolding import UnfoldedSpectrum
from .validation import as_float_array

__all__ = [
    "StatCurve",
    "spacing_distribution",
    "cumulative_spacing",
    "number_variance",
    "dyson_mehta",
    "ks_distance",
]


@dataclass
class StatCurve:
    """A sampled statistic: abscissa grid, ordinate values, optional counts."""

    abscissa: np.ndarray
    ordinate: np.ndarray
    counts: np.ndarray | None = None

    def __post_init__(self):
        self.abscissa = np.asarray(self.abscissa, dtype=float)
        self.ordinate = np.asarray(self.ordinate, dtype=float)
        if self.abscissa.shape != self.ordinate.shape:
            raise InvalidArgumentError("abscissa and ordinate must have equal length")
        if np.any(np.diff(self.abscissa) < 0.0):
            raise InvalidArgumentError("abscissa must be ascending")
        if self.counts is not None:
            self.counts = np.asarray(self.counts)
            if self.counts.shape != self.abscissa.shape:
                raise InvalidArgumentError("counts must match the abscissa length")


def _pooled_spacings(u: UnfoldedSpectrum) -> np.ndarray:
    for i, seq in enumerate(u.sequences):
        if seq.size < 2:
            raise InvalidArgumentError(f"sequences[{i}] has fewer than 2 levels")
    return u.spacings()


def spacing_distribution(u: UnfoldedSpectrum, bin_width: float = 0.1) -> StatCurve:
    """Histogram estimate of the nearest-neighbour spacing density P(s).

    Spacings are pooled within sequences only.  The returned ordinate is a
    density normalised to unit area; ``counts`` holds the bin occupancies.
    Bin centres are returned as abscissa.
    """
    if bin_width <= 0.0:
        raise InvalidArgumentError("bin_width must be positive")
    s = _pooled_spacings(u)
    n_bins = max(1, int(math.ceil(s.max() / bin_width))) if s.max() > 0 else 1
    edges = bin_width * np.arange(n_bins + 1)
    counts, _ = np.histogram(s, bins=edges)
    density = counts / (s.size * bin_width)
    centers = 0.5 * (edges[:-1] + edges[1:])
    return StatCurve(centers, density, counts)


def cumulative_spacing(u: UnfoldedSpectrum) -> StatCurve:
    """Empirical cumulative I(s) of the pooled spacings.

    The step function is returned with both corner points at every jump so
    that a sup-norm comparison against a reference curve recovers the exact
    Kolmogorov-Smirnov statistic.
    """
    s = np.sort(_pooled_spacings(u))
    n = s.size
    lo = (np.arange(n)) / n
    hi = (np.arange(n) + 1.0) / n
    abscissa = np.repeat(s, 2)
    ordinate = np.column_stack([lo, hi]).ravel()
    return StatCurve(abscissa, ordinate)


def _window_starts(seq: np.ndarray, L: float, stride: float) -> np.ndarray:
    span = seq[-1] - seq[0]
    if span <= L:
        return np.empty(0)
    n_windows = int(math.floor((span - L) / stride)) + 1
    return seq[0] + stride * np.arange(n_windows)


def number_variance(
    u: UnfoldedSpectrum, lengths, stride_fraction: float = 0.25
) -> StatCurve:
    """Number variance Sigma^2(L) = <(N(L) - L)^2> over sliding windows.

    Windows of length L slide in steps of ``stride_fraction * L`` within
    each sequence; window results are pooled across sequences with equal
    weight per window.  A :class:`QualityWarning` is emitted when the mean
    count deviates from L by more than 5%.
    """
    lengths = as_float_array(lengths, "lengths")
    if np.any(lengths <= 0.0):
        raise InvalidArgumentError("window lengths must be positive")
    L_max = lengths.max()
    for i, seq in enumerate(u.sequences):
        if seq.size < 2 * L_max:
            raise InvalidArgumentError(
                f"sequences[{i}] has {seq.size} levels; need >= 2*max(L) = {2 * L_max:.0f}"
            )
        if seq[-1] - seq[0] <= L_max:
            raise InvalidArgumentError(f"window length {L_max} exceeds the span of sequences[{i}]")
    ordinate = np.empty(lengths.size)
    n_windows = np.zeros(lengths.size, dtype=int)
    for j, L in enumerate(lengths):
        sq_sum = 0.0
        count_sum = 0.0
        total = 0
        for seq in u.sequences:
            starts = _window_starts(seq, L, stride_fraction * L)
            if starts.size == 0:
                continue
            counts = np.searchsorted(seq, starts + L, side="left") - np.searchsorted(
                seq, starts, side="left"
            )
            sq_sum += float(np.sum((counts - L) ** 2))
            count_sum += float(np.sum(counts))
            total += starts.size
        if total == 0:
            raise InvalidArgumentError(f"no window of length {L} fits any sequence")
        ordinate[j] = sq_sum / total
        n_windows[j] = total
        mean_count = count_sum / total
        if abs(mean_count - L) > 0.05 * L:
            warnings.warn(
                f"mean window count {mean_count:.3f} deviates from L={L} by more than 5%",
                QualityWarning,
                stacklevel=2,
            )
    return StatCurve(lengths, ordinate, n_windows)


def _delta3_windows(seq: np.ndarray, L: float, stride: float) -> np.ndarray:
    """Exact least-squares staircase deviation for every window position.

    Within a window [x, x+L] centred at c the staircase (counted locally)
    is piecewise constant, so the integrals entering the linear fit reduce
    to telescoped sums over the level positions u_j = eps_j - c:

        I1 = int N du     = m L/2     - sum u_j
        I2 = int N u du   = (m L^2/4  - sum u_j^2) / 2
        I3 = int N^2 du   = m^2 L/2   - 2 sum j u_j + sum u_j

    and Delta3 = I3/L - (I1/L)^2 - (L^2/12) (12 I2 / L^3)^2.
    """
    starts = _window_starts(seq, L, stride)
    if starts.size == 0:
        return np.empty(0)
    lo = np.searchsorted(seq, starts, side="left")
    hi = np.searchsorted(seq, starts + L, side="left")
    m = (hi - lo).astype(float)
    p1 = np.concatenate([[0.0], np.cumsum(seq)])
    p2 = np.concatenate([[0.0], np.cumsum(seq**2)])
    p3 = np.concatenate([[0.0], np.cumsum(np.arange(1, seq.size + 1) * seq)])
    c = starts + 0.5 * L
    sum_e = p1[hi] - p1[lo]
    sum_e2 = p2[hi] - p2[lo]
    # rank-weighted sum with ranks restarting at 1 inside each window
    sum_je = (p3[hi] - p3[lo]) - lo * sum_e
    sum_u = sum_e - m * c
    sum_u2 = sum_e2 - 2.0 * c * sum_e + m * c**2
    sum_ju = sum_je - c * 0.5 * m * (m + 1.0)
    i1 = 0.5 * m * L - sum_u
    i2 = 0.5 * (0.25 * m * L**2 - sum_u2)
    i3 = 0.5 * m**2 * L - 2.0 * sum_ju + sum_u
    a = i1 / L
    b = 12.0 * i2 / L**3
    return i3 / L - a**2 - (L**2 / 12.0) * b**2


def dyson_mehta(
    u: UnfoldedSpectrum, lengths, stride_fraction: float = 0.25
) -> StatCurve:
    """Spectral rigidity Delta3(L): least-squares deviation of the staircase.

    Per window the minimising straight line is obtained in closed form
    from the piecewise-analytic integrals of the staircase; the quadratic
    deviation is averaged over window positions and sequences.
    """
    lengths = as_float_array(lengths, "lengths")
    if np.any(lengths <= 0.0):
        raise InvalidArgumentError("window lengths must be positive")
    L_max = lengths.max()
    for i, seq in enumerate(u.sequences):
        if seq.size < 2 * L_max:
            raise InvalidArgumentError(
                f"sequences[{i}] has {seq.size} levels; need >= 2*max(L) = {2 * L_max:.0f}"
            )
        if seq[-1] - seq[0] <= L_max:
            raise InvalidArgumentError(f"window length {L_max} exceeds the span of sequences[{i}]")
    ordinate = np.empty(lengths.size)
    n_windows = np.zeros(lengths.size, dtype=int)
    for j, L in enumerate(lengths):
        acc = 0.0
        total = 0
        for seq in u.sequences:
            vals = _delta3_windows(seq, L, stride_fraction * L)
            acc += float(vals.sum())
            total += vals.size
        if total == 0:
            raise InvalidArgumentError(f"no window of length {L} fits any sequence")
        ordinate[j] = acc / total
        n_windows[j] = total
    return StatCurve(lengths, ordinate, n_windows)


def _sided_values(grid: np.ndarray, absc: np.ndarray, ordv: np.ndarray):
    """Left and right limits of a monotone curve at every grid point.

    The curve is piecewise linear; repeated abscissa values encode jumps
    (as produced by :func:`cumulative_spacing`).  Outside the support the
    curve is clamped to its terminal values.
    """
    ux, first = np.unique(absc, return_index=True)
    last = np.searchsorted(absc, ux, side="right") - 1
    lo_v = ordv[first]
    hi_v = ordv[last]
    lo = np.empty(grid.size)
    hi = np.empty(grid.size)
    pos = np.searchsorted(ux, grid, side="left")
    on_knot = (pos < ux.size) & (np.take(ux, pos, mode="clip") == grid)
    below = grid < ux[0]
    above = grid > ux[-1]
    inside = ~(on_knot | below | above)
    lo[below] = hi[below] = lo_v[0]
    lo[above] = hi[above] = hi_v[-1]
    lo[on_knot] = lo_v[pos[on_knot]]
    hi[on_knot] = hi_v[pos[on_knot]]
    if np.any(inside):
        j = pos[inside]
        t = (grid[inside] - ux[j - 1]) / (ux[j] - ux[j - 1])
        val = hi_v[j - 1] + t * (lo_v[j] - hi_v[j - 1])
        lo[inside] = hi[inside] = val
    return lo, hi


def ks_distance(empirical: StatCurve, reference: StatCurve) -> float:
    """Sup-norm distance between two cumulative curves.

    Both inputs must be (weakly) monotone.  The supremum is taken over the
    union of the two grids, comparing the one-sided limits of each curve so
    that step curves with repeated abscissa points (jump corners) are
    handled exactly.
    """
    for name, curve in (("empirical", empirical), ("reference", reference)):
        if np.any(np.diff(curve.ordinate) < -1e-12):
            raise InvalidArgumentError(f"{name} curve is not monotone, not a cumulative")
    grid = np.union1d(empirical.abscissa, reference.abscissa)
    e_lo, e_hi = _sided_values(grid, empirical.abscissa, empirical.ordinate)
    r_lo, r_hi = _sided_values(grid, reference.abscissa, reference.ordinate)
    return float(max(np.max(np.abs(e_lo - r_lo)), np.max(np.abs(e_hi - r_hi))))
