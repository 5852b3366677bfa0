"""WAIC (widely applicable information criterion) from posterior draws.

Deviance scale: waic = -2 * (lppd - p_waic), lower is better, where
lppd = sum_i log mean_s exp(l_is) (computed via log-sum-exp) and
p_waic = sum_i var_s(l_is) over the per-draw pointwise log-likelihoods l_is.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .inference import ModelSpec, SurvivalDataset, pointwise_log_likelihood
from .sampler import PosteriorDraws


@dataclass(frozen=True)
class WaicResult:
    waic: float
    lppd: float
    p_waic: float
    pointwise_lppd: np.ndarray
    pointwise_p: np.ndarray

    def __post_init__(self):
        assert abs(self.waic - (-2.0 * (self.lppd - self.p_waic))) < 1e-8


def pointwise_matrix(data: SurvivalDataset, spec: ModelSpec,
                     draws: PosteriorDraws) -> np.ndarray:
    """(draws, observations) matrix of pointwise log-likelihoods."""
    flat = draws.flat()
    thetas = draws.layout.to_sampling(flat)
    return np.stack([pointwise_log_likelihood(data, spec, thetas[s])
                     for s in range(len(thetas))])


def waic(data: SurvivalDataset, spec: ModelSpec, draws: PosteriorDraws,
         min_draws: int = 100) -> WaicResult:
    flat_len = draws.flat().shape[0]
    if flat_len < min_draws:
        raise ValueError(f"need >= {min_draws} kept draws for WAIC, have {flat_len}")
    ll = pointwise_matrix(data, spec, draws)
    # log mean exp per observation, overflow-safe.
    mx = ll.max(axis=0)
    pointwise_lppd = mx + np.log(np.mean(np.exp(ll - mx), axis=0))
    pointwise_p = ll.var(axis=0, ddof=1)
    if np.all(np.ptp(ll, axis=0) == 0.0):
        warnings.warn("degenerate draws: zero variance in every pointwise "
                      "log-likelihood; p_waic set to 0", RuntimeWarning, stacklevel=2)
        pointwise_p = np.zeros_like(pointwise_p)
    lppd = float(pointwise_lppd.sum())
    p = float(pointwise_p.sum())
    return WaicResult(waic=-2.0 * (lppd - p), lppd=lppd, p_waic=p,
                      pointwise_lppd=pointwise_lppd, pointwise_p=pointwise_p)


def waic_from_matrix(ll: np.ndarray) -> WaicResult:
    """WAIC directly from a (draws, observations) log-likelihood matrix."""
    ll = np.asarray(ll, dtype=float)
    mx = ll.max(axis=0)
    pointwise_lppd = mx + np.log(np.mean(np.exp(ll - mx), axis=0))
    pointwise_p = ll.var(axis=0, ddof=1) if ll.shape[0] > 1 else np.zeros(ll.shape[1])
    lppd = float(pointwise_lppd.sum())
    p = float(pointwise_p.sum())
    return WaicResult(waic=-2.0 * (lppd - p), lppd=lppd, p_waic=p,
                      pointwise_lppd=pointwise_lppd, pointwise_p=pointwise_p)
