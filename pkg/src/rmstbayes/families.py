"""Parametric survival families and cluster-effect conditioning.

Four families, each in the parameterization used throughout the library:

* exponential: rate ``lam``, S(t) = exp(-lam * t)
* weibull:     scale ``lam``, shape ``k``, S(t) = exp(-lam * t^k)
* log-logistic: log-odds scale ``mu``, shape ``k``, S(t) = 1/(1 + e^mu t^k)
* log-normal:  log-time mean ``mu`` and variance ``sigma2``

A cluster effect is either a random offset ``u`` added to the linear-scale
parameter (lam -> lam e^u for exponential/weibull, mu -> mu + u for
log-logistic/log-normal) or a multiplicative frailty ``v`` on the hazard,
which exponentiates the survival function: S(t|v) = S(t)^v and
f(t|v) = v h(t) S(t)^v.

Everything is scalar, pure, and log-space where it matters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .specfun import log_std_normal_sf


class Family(str, Enum):
    EXPONENTIAL = "exponential"
    WEIBULL = "weibull"
    LOG_LOGISTIC = "loglogistic"
    LOG_NORMAL = "lognormal"


@dataclass(frozen=True)
class FamilyParams:
    """Distribution parameters for one family (unused fields are None)."""

    family: Family
    lam: float | None = None
    k: float | None = None
    mu: float | None = None
    sigma2: float | None = None

    def __post_init__(self):
        fam = self.family
        if fam is Family.EXPONENTIAL:
            if not (self.lam is not None and self.lam > 0):
                raise ValueError("exponential requires lam > 0")
        elif fam is Family.WEIBULL:
            if not (self.lam is not None and self.lam > 0 and self.k is not None and self.k > 0):
                raise ValueError("weibull requires lam > 0 and k > 0")
        elif fam is Family.LOG_LOGISTIC:
            if not (self.mu is not None and math.isfinite(self.mu) and self.k is not None and self.k > 0):
                raise ValueError("loglogistic requires finite mu and k > 0")
        elif fam is Family.LOG_NORMAL:
            if not (self.mu is not None and math.isfinite(self.mu) and self.sigma2 is not None and self.sigma2 > 0):
                raise ValueError("lognormal requires finite mu and sigma2 > 0")

    @staticmethod
    def exponential(lam: float) -> "FamilyParams":
        return FamilyParams(Family.EXPONENTIAL, lam=lam)

    @staticmethod
    def weibull(lam: float, k: float) -> "FamilyParams":
        return FamilyParams(Family.WEIBULL, lam=lam, k=k)

    @staticmethod
    def loglogistic(mu: float, k: float) -> "FamilyParams":
        return FamilyParams(Family.LOG_LOGISTIC, mu=mu, k=k)

    @staticmethod
    def lognormal(mu: float, sigma2: float) -> "FamilyParams":
        return FamilyParams(Family.LOG_NORMAL, mu=mu, sigma2=sigma2)


class EffectKind(str, Enum):
    NONE = "none"
    RANDOM = "random"
    FRAILTY = "frailty"


@dataclass(frozen=True)
class EffectValue:
    kind: EffectKind
    value: float = 0.0

    def __post_init__(self):
        if self.kind is EffectKind.FRAILTY and not self.value > 0:
            raise ValueError("frailty value must be positive")


NO_EFFECT = EffectValue(EffectKind.NONE)


def random_offset(u: float) -> EffectValue:
    return EffectValue(EffectKind.RANDOM, u)


def frailty(v: float) -> EffectValue:
    return EffectValue(EffectKind.FRAILTY, v)


def shifted(p: FamilyParams, u: float) -> FamilyParams:
    """Apply a random offset to the linear-scale parameter."""
    if u == 0.0:
        return p
    if p.family in (Family.EXPONENTIAL, Family.WEIBULL):
        return FamilyParams(p.family, lam=p.lam * math.exp(u), k=p.k)
    return FamilyParams(p.family, mu=p.mu + u, k=p.k, sigma2=p.sigma2)


def _base_log_survival(p: FamilyParams, t: float) -> float:
    if p.family is Family.EXPONENTIAL:
        return -p.lam * t
    if p.family is Family.WEIBULL:
        return -p.lam * math.exp(p.k * math.log(t)) if t > 0 else 0.0
    if p.family is Family.LOG_LOGISTIC:
        w = p.mu + p.k * math.log(t)
        # -log(1 + e^w), overflow-safe
        return -w - math.log1p(math.exp(-w)) if w > 0 else -math.log1p(math.exp(w))
    sigma = math.sqrt(p.sigma2)
    return log_std_normal_sf((math.log(t) - p.mu) / sigma)


def _base_log_hazard(p: FamilyParams, t: float) -> float:
    logt = math.log(t)
    if p.family is Family.EXPONENTIAL:
        return math.log(p.lam)
    if p.family is Family.WEIBULL:
        return math.log(p.lam) + math.log(p.k) + (p.k - 1.0) * logt
    if p.family is Family.LOG_LOGISTIC:
        # h = e^mu k t^(k-1) S(t)
        return p.mu + math.log(p.k) + (p.k - 1.0) * logt + _base_log_survival(p, t)
    sigma = math.sqrt(p.sigma2)
    z = (logt - p.mu) / sigma
    log_pdf = -logt - 0.5 * math.log(2.0 * math.pi * p.sigma2) - 0.5 * z * z
    return log_pdf - log_std_normal_sf(z)


def _resolve(p: FamilyParams, e: EffectValue) -> tuple[FamilyParams, float]:
    """Reduce an effect to (conditioned base params, frailty multiplier)."""
    if e.kind is EffectKind.RANDOM:
        return shifted(p, e.value), 1.0
    if e.kind is EffectKind.FRAILTY:
        return p, e.value
    return p, 1.0


def log_survival(p: FamilyParams, e: EffectValue = NO_EFFECT, t: float = None) -> float:
    """log S(t | p, e); frailty v multiplies the cumulative hazard."""
    if not t > 0:
        raise ValueError(f"survival time must be positive, got {t}")
    base, v = _resolve(p, e)
    return v * _base_log_survival(base, t)


def log_density(p: FamilyParams, e: EffectValue = NO_EFFECT, t: float = None) -> float:
    """log f(t | p, e); for frailty, f = v h(t) S(t)^v."""
    if not t > 0:
        raise ValueError(f"survival time must be positive, got {t}")
    base, v = _resolve(p, e)
    log_h = _base_log_hazard(base, t)
    log_s = _base_log_survival(base, t)
    return (math.log(v) if v != 1.0 else 0.0) + log_h + v * log_s


def hazard(p: FamilyParams, e: EffectValue = NO_EFFECT, t: float = None) -> float:
    """h(t | p, e) = f/S; equals v * h_base(t) under frailty."""
    if not t > 0:
        raise ValueError(f"survival time must be positive, got {t}")
    base, v = _resolve(p, e)
    return v * math.exp(_base_log_hazard(base, t))


@dataclass(frozen=True)
class AltFamilyParams:
    """Time-scale parameterizations: weibull S(t)=exp{-(t/scale)^k},
    log-logistic S(t)=1/(1+(t/scale)^k)."""

    family: Family
    scale: float
    k: float

    def __post_init__(self):
        if self.family not in (Family.WEIBULL, Family.LOG_LOGISTIC):
            raise ValueError("alternate parameterization exists for weibull/loglogistic only")
        if not (self.scale > 0 and self.k > 0):
            raise ValueError("alternate parameters require scale > 0 and k > 0")


def convert_weibull_alt(alt: AltFamilyParams) -> FamilyParams:
    """S(t)=exp{-(t/scale)^k}  ->  lam = scale^(-k)."""
    if alt.family is not Family.WEIBULL:
        raise ValueError("expected a weibull alternate parameterization")
    return FamilyParams.weibull(lam=alt.scale ** (-alt.k), k=alt.k)


def weibull_to_alt(p: FamilyParams) -> AltFamilyParams:
    if p.family is not Family.WEIBULL:
        raise ValueError("expected weibull params")
    return AltFamilyParams(Family.WEIBULL, scale=p.lam ** (-1.0 / p.k), k=p.k)


def convert_loglogistic_alt(alt: AltFamilyParams) -> FamilyParams:
    """S(t)=1/(1+(t/scale)^k)  ->  mu = -k log(scale)."""
    if alt.family is not Family.LOG_LOGISTIC:
        raise ValueError("expected a log-logistic alternate parameterization")
    return FamilyParams.loglogistic(mu=-alt.k * math.log(alt.scale), k=alt.k)


def loglogistic_to_alt(p: FamilyParams) -> AltFamilyParams:
    if p.family is not Family.LOG_LOGISTIC:
        raise ValueError("expected log-logistic params")
    return AltFamilyParams(Family.LOG_LOGISTIC, scale=math.exp(-p.mu / p.k), k=p.k)
