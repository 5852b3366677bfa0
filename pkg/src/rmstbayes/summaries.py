"""Posterior summaries: mean, median, KDE mode, SD, equal-tailed credible
intervals (type-7 / linear-interpolation quantiles), and exceedance
probabilities P(value < threshold); plus forest-plot rows and histogram bins
as plain data (no plotting)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RmstSummary:
    mean: float
    median: float
    mode: float
    sd: float
    ci_level: float
    ci_low: float
    ci_high: float
    exceedance: tuple = ()   # ((threshold, P(value < threshold)), ...)

    def __post_init__(self):
        if not self.ci_low <= self.ci_high:
            raise ValueError("credible interval endpoints out of order")
        for _, p in self.exceedance:
            if not 0.0 <= p <= 1.0:
                raise ValueError("exceedance probabilities must lie in [0, 1]")


def silverman_bandwidth(v: np.ndarray) -> float:
    sd = float(np.std(v, ddof=1))
    q75, q25 = np.quantile(v, [0.75, 0.25])
    iqr = float(q75 - q25)
    spread = min(sd, iqr / 1.34) if iqr > 0 else sd
    return 0.9 * spread * len(v) ** (-0.2)


def kde_mode(v: np.ndarray, grid_points: int = 512) -> float:
    """Argmax of a Gaussian kernel density estimate on a uniform grid
    spanning the sample range."""
    lo, hi = float(v.min()), float(v.max())
    if lo == hi:
        return lo
    bw = silverman_bandwidth(v)
    if bw <= 0.0:
        return float(np.median(v))
    grid = np.linspace(lo, hi, grid_points)
    # |z| > 39 contributes exp(-760) ~ 0; clipping avoids overflow in z * z
    # when the sample spans many orders of magnitude relative to bw
    z = np.clip(np.abs(grid[:, None] - v[None, :]) / bw, 0.0, 39.0)
    density = np.exp(-0.5 * z * z).sum(axis=1)
    return float(grid[int(np.argmax(density))])


def summarize(v, level: float = 0.95, thresholds=()) -> RmstSummary:
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or len(v) < 10:
        raise ValueError("need a 1-D sample of at least 10 values")
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    alpha = (1.0 - level) / 2.0
    lo, hi = np.quantile(v, [alpha, 1.0 - alpha])  # type-7 interpolation
    return RmstSummary(
        mean=float(np.mean(v)),
        median=float(np.median(v)),
        mode=kde_mode(v),
        sd=float(np.std(v, ddof=1)),
        ci_level=level,
        ci_low=float(lo),
        ci_high=float(hi),
        exceedance=tuple((float(th), float(np.mean(v < th))) for th in thresholds),
    )


def forest_rows(cluster_summaries, marginal: RmstSummary | None = None) -> list:
    """Rows of (label, mean, ci_low, ci_high), one per cluster, with the
    marginal summary appended last when provided."""
    rows = [(str(label), s.mean, s.ci_low, s.ci_high)
            for label, s in cluster_summaries.items()]
    if marginal is not None:
        rows.append(("marginal", marginal.mean, marginal.ci_low, marginal.ci_high))
    return rows


def histogram_bins(v, bins: int = 50) -> tuple:
    """(edges, counts) over [min, max]; a degenerate range collapses to a
    single bin containing everything."""
    v = np.asarray(v, dtype=float)
    if bins < 1:
        raise ValueError("bins must be >= 1")
    lo, hi = float(v.min()), float(v.max())
    if lo == hi:
        return np.array([lo - 0.5, lo + 0.5]), np.array([len(v)])
    counts, edges = np.histogram(v, bins=bins, range=(lo, hi))
    return edges, counts
