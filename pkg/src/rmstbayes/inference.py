"""Censored-data log-likelihoods, log-priors, and joint log-posteriors.

Covers all 12 model variants: 4 families x {none, random-effect, frailty},
with covariates entering through the linear predictor eta = x @ beta
(lam = exp(eta) for exponential/weibull, mu = eta for log-logistic/log-normal)
and an additive cluster offset (random effect) or multiplicative hazard
frailty.

Parameter vectors are laid out as

    [beta (q) | shape (0 or 1) | cluster effects (0 or M) | log phi (0 or 1)]

where the shape coordinate is log k (weibull, log-logistic) or log sigma^2
(log-normal), effects are u_i (random) or log v_i (frailty), and phi is the
effect-scale hyperparameter.  All positive parameters are carried on log
scale so random-walk proposals are unconstrained; the log-priors include the
corresponding Jacobian terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .families import EffectKind, Family
from .specfun import log_std_normal_sf

_LOG_NORM_SF = np.vectorize(log_std_normal_sf, otypes=[float])
_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class SurvivalDataset:
    """Right-censored survival data with a design matrix and cluster labels.

    ``x`` has the intercept constant 1 in column 0 and the group indicator in
    column 1.  ``cluster`` holds 1-based contiguous cluster indices.
    """

    time: np.ndarray
    event: np.ndarray
    x: np.ndarray
    cluster: np.ndarray
    column_names: tuple = ()

    def __post_init__(self):
        time = np.asarray(self.time, dtype=float)
        event = np.asarray(self.event, dtype=int)
        x = np.asarray(self.x, dtype=float)
        cluster = np.asarray(self.cluster, dtype=int)
        object.__setattr__(self, "time", time)
        object.__setattr__(self, "event", event)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "cluster", cluster)
        n = len(time)
        if x.ndim != 2 or x.shape[0] != n or len(event) != n or len(cluster) != n:
            raise ValueError("time, event, x, cluster must have matching lengths")
        if not np.all(time > 0):
            raise ValueError("all times must be positive")
        if not np.all((event == 0) | (event == 1)):
            raise ValueError("event indicators must be 0 or 1")
        if not np.all(np.isfinite(x)):
            raise ValueError("covariates must be finite")
        labels = np.unique(cluster)
        if len(labels) and (labels[0] != 1 or labels[-1] != len(labels)):
            raise ValueError("cluster indices must be contiguous from 1")
        if self.column_names and len(self.column_names) != x.shape[1]:
            raise ValueError("column_names length must match design width")

    @property
    def n(self) -> int:
        return len(self.time)

    @property
    def q(self) -> int:
        return self.x.shape[1]

    @property
    def n_clusters(self) -> int:
        return int(self.cluster.max()) if len(self.cluster) else 0


@dataclass(frozen=True)
class ModelSpec:
    """Family + cluster-effect choice + prior hyperparameters.

    ``coef_prior_variance`` is the diagonal of the normal prior covariance on
    beta (scalar = shared).  ``phi_upper`` bounds the uniform prior on phi,
    ``shape_prior_a``/``shape_prior_b`` are the gamma shape/rate prior on k,
    and ``sigma2_upper`` bounds the uniform prior on sigma^2.
    """

    family: Family
    effect: EffectKind = EffectKind.NONE
    coef_prior_variance: float = 100.0
    phi_upper: float = 10.0
    shape_prior_a: float = 0.01
    shape_prior_b: float = 0.01
    sigma2_upper: float = 100.0

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "effect", EffectKind(self.effect))
        for name in ("phi_upper", "shape_prior_a", "shape_prior_b", "sigma2_upper"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        cvar = np.atleast_1d(np.asarray(self.coef_prior_variance, dtype=float))
        if not np.all(cvar > 0):
            raise ValueError("coef_prior_variance entries must be positive")

    @property
    def has_shape(self) -> bool:
        return self.family is not Family.EXPONENTIAL

    def coef_variances(self, q: int) -> np.ndarray:
        cvar = np.atleast_1d(np.asarray(self.coef_prior_variance, dtype=float))
        if len(cvar) == 1:
            return np.full(q, cvar[0])
        if len(cvar) != q:
            raise ValueError(f"coef_prior_variance has {len(cvar)} entries for q={q}")
        return cvar


@dataclass(frozen=True)
class ParamLayout:
    """Index map from a flat parameter vector to its blocks."""

    q: int
    has_shape: bool
    effect: EffectKind
    n_clusters: int

    @property
    def shape_index(self) -> int | None:
        return self.q if self.has_shape else None

    # Alias used by consumers of natural-scale draw matrices.
    @property
    def shape_column(self) -> int | None:
        return self.shape_index

    @property
    def effect_indices(self) -> range:
        start = self.q + (1 if self.has_shape else 0)
        m = self.n_clusters if self.effect is not EffectKind.NONE else 0
        return range(start, start + m)

    @property
    def effect_columns(self) -> range:
        return self.effect_indices

    @property
    def phi_index(self) -> int | None:
        if self.effect is EffectKind.NONE:
            return None
        return self.effect_indices.stop

    @property
    def dim(self) -> int:
        d = self.q + (1 if self.has_shape else 0)
        if self.effect is not EffectKind.NONE:
            d += self.n_clusters + 1
        return d

    def column_names(self, design_names: tuple = ()) -> tuple:
        names = list(design_names) if design_names else [f"beta{j}" for j in range(self.q)]
        if self.has_shape:
            names.append("sigma2" if self._lognormal_shape else "k")
        if self.effect is not EffectKind.NONE:
            prefix = "u" if self.effect is EffectKind.RANDOM else "v"
            names.extend(f"{prefix}[{i}]" for i in range(1, self.n_clusters + 1))
            names.append("phi")
        return tuple(names)

    # set by param_layout(); whether the shape slot holds sigma^2
    _lognormal_shape: bool = False

    def beta(self, theta: np.ndarray) -> np.ndarray:
        return theta[: self.q]

    def shape_value(self, theta: np.ndarray) -> float | None:
        """Natural-scale shape (k or sigma^2) from a sampling-scale vector."""
        i = self.shape_index
        return math.exp(theta[i]) if i is not None else None

    def effects(self, theta: np.ndarray) -> np.ndarray:
        """Sampling-scale effect block (u_i, or log v_i)."""
        return theta[self.effect_indices.start: self.effect_indices.stop]

    def phi(self, theta: np.ndarray) -> float | None:
        i = self.phi_index
        return math.exp(theta[i]) if i is not None else None

    def to_natural(self, theta: np.ndarray) -> np.ndarray:
        """Exponentiate the log-scale coordinates (shape, frailty v, phi)."""
        out = np.array(theta, dtype=float, copy=True)
        for i in self._log_scale_indices():
            out[..., i] = np.exp(out[..., i])
        return out

    def to_sampling(self, natural: np.ndarray) -> np.ndarray:
        """Inverse of to_natural."""
        out = np.array(natural, dtype=float, copy=True)
        for i in self._log_scale_indices():
            out[..., i] = np.log(out[..., i])
        return out

    def _log_scale_indices(self):
        idx = []
        if self.shape_index is not None:
            idx.append(self.shape_index)
        if self.effect is EffectKind.FRAILTY:
            idx.extend(self.effect_indices)
        if self.phi_index is not None:
            idx.append(self.phi_index)
        return idx


def param_layout(spec: ModelSpec, data: SurvivalDataset) -> ParamLayout:
    return ParamLayout(
        q=data.q,
        has_shape=spec.has_shape,
        effect=spec.effect,
        n_clusters=data.n_clusters,
        _lognormal_shape=spec.family is Family.LOG_NORMAL,
    )


def _check_theta(layout: ParamLayout, theta: np.ndarray) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (layout.dim,):
        raise ValueError(f"parameter vector has shape {theta.shape}, expected ({layout.dim},)")
    return theta


def pointwise_log_likelihood(data: SurvivalDataset, spec: ModelSpec,
                             theta: np.ndarray) -> np.ndarray:
    """Per-row delta*log f + (1-delta)*log S; sums to log_likelihood."""
    layout = param_layout(spec, data)
    theta = _check_theta(layout, theta)
    beta = layout.beta(theta)
    eta = data.x @ beta
    t = data.time
    logt = np.log(t)
    delta = data.event

    k = sigma2 = None
    if spec.family in (Family.WEIBULL, Family.LOG_LOGISTIC):
        k = layout.shape_value(theta)
    elif spec.family is Family.LOG_NORMAL:
        sigma2 = layout.shape_value(theta)

    row_effect = None
    if spec.effect is not EffectKind.NONE:
        row_effect = layout.effects(theta)[data.cluster - 1]
    if spec.effect is EffectKind.RANDOM and row_effect is not None:
        eta = eta + row_effect  # lam -> lam e^u / mu -> mu + u

    if spec.family is Family.EXPONENTIAL:
        log_h = eta
        log_s = -np.exp(eta) * t
    elif spec.family is Family.WEIBULL:
        log_h = eta + math.log(k) + (k - 1.0) * logt
        log_s = -np.exp(eta + k * logt)
    elif spec.family is Family.LOG_LOGISTIC:
        w = eta + k * logt
        log_s = -np.logaddexp(0.0, w)
        log_h = eta + math.log(k) + (k - 1.0) * logt + log_s
    else:
        sigma = math.sqrt(sigma2)
        z = (logt - eta) / sigma
        log_s = _LOG_NORM_SF(z)
        log_pdf = -logt - 0.5 * math.log(sigma2) - 0.5 * _LOG_2PI - 0.5 * z * z
        log_h = log_pdf - log_s

    if spec.effect is EffectKind.FRAILTY:
        v = np.exp(row_effect)  # effects are log v
        return delta * (row_effect + log_h) + v * log_s
    return delta * log_h + log_s


def log_likelihood(data: SurvivalDataset, spec: ModelSpec, theta: np.ndarray) -> float:
    return float(np.sum(pointwise_log_likelihood(data, spec, theta)))


def _log_gamma_density(x: float, shape: float, rate: float) -> float:
    return shape * math.log(rate) - math.lgamma(shape) + (shape - 1.0) * math.log(x) - rate * x


def log_prior(spec: ModelSpec, theta: np.ndarray, q: int, n_clusters: int = 0) -> float:
    """Joint log prior density including Jacobians of the log transforms.

    Returns -inf when phi or sigma^2 fall outside their uniform supports.
    """
    layout = ParamLayout(q=q, has_shape=spec.has_shape, effect=spec.effect,
                         n_clusters=n_clusters,
                         _lognormal_shape=spec.family is Family.LOG_NORMAL)
    theta = _check_theta(layout, theta)
    total = 0.0

    beta = layout.beta(theta)
    cvar = spec.coef_variances(q)
    total += float(np.sum(-0.5 * (_LOG_2PI + np.log(cvar)) - 0.5 * beta * beta / cvar))

    if layout.shape_index is not None:
        log_shape = theta[layout.shape_index]
        if spec.family is Family.LOG_NORMAL:
            sigma2 = math.exp(log_shape)
            if sigma2 >= spec.sigma2_upper:
                return -math.inf
            total += -math.log(spec.sigma2_upper) + log_shape  # U(0,s) + Jacobian
        else:
            k = math.exp(log_shape)
            total += _log_gamma_density(k, spec.shape_prior_a, spec.shape_prior_b) + log_shape

    if spec.effect is not EffectKind.NONE:
        log_phi = theta[layout.phi_index]
        phi = math.exp(log_phi)
        if phi >= spec.phi_upper:
            return -math.inf
        total += -math.log(spec.phi_upper) + log_phi  # U(0,xi) + Jacobian
        eff = layout.effects(theta)
        if spec.effect is EffectKind.RANDOM:
            total += float(np.sum(-0.5 * (_LOG_2PI + 2.0 * math.log(phi))
                                  - 0.5 * eff * eff / (phi * phi)))
        else:
            r = 1.0 / phi  # v_i ~ Gamma(1/phi, 1/phi), sampled as log v
            v = np.exp(eff)
            total += float(np.sum(r * math.log(r) - math.lgamma(r)
                                  + (r - 1.0) * eff - r * v + eff))
    return total


def log_posterior(data: SurvivalDataset, spec: ModelSpec, theta: np.ndarray) -> float:
    lp = log_prior(spec, theta, data.q, data.n_clusters)
    if lp == -math.inf:
        return -math.inf
    return lp + log_likelihood(data, spec, theta)
