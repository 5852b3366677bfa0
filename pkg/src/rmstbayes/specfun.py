"""Scalar special functions used by the closed-form restricted-mean formulas.

Everything here is dependency-free (stdlib ``math`` only) so the numeric
kernel can be audited in isolation.  All functions are pure and thread-safe.

Conventions: the incomplete gamma and incomplete beta integrals are
*non-regularized*, i.e. the raw integrals

    lower_incomplete_gamma(z, a) = int_0^z t^(a-1) e^(-t) dt
    incomplete_beta(z, a, b)     = int_0^z t^(a-1) (1-t)^(b-1) dt

The beta integral supports b <= 0 as long as z < 1 (the singularity at t=1
is then excluded from the integration range).
"""

from __future__ import annotations

import math

_EPS = 1e-16
_MAX_ITER = 1000
_SQRT2 = math.sqrt(2.0)


def ln_gamma(a: float) -> float:
    """log Gamma(a) for a > 0."""
    if not a > 0.0:
        raise ValueError(f"ln_gamma requires a > 0, got {a}")
    return math.lgamma(a)


def std_normal_cdf(x: float) -> float:
    """Standard normal CDF Phi(x)."""
    return 0.5 * math.erfc(-x / _SQRT2)


def std_normal_sf(x: float) -> float:
    """Upper tail 1 - Phi(x), computed without cancellation."""
    return 0.5 * math.erfc(x / _SQRT2)


def log_std_normal_sf(x: float) -> float:
    """log(1 - Phi(x)), stable far into the upper tail.

    erfc underflows near x ~ 37; beyond x = 25 an asymptotic expansion of the
    Mills ratio is used instead (relative error < 1e-9 at the switch point).
    """
    if x < 25.0:
        return math.log(0.5 * math.erfc(x / _SQRT2))
    inv2 = 1.0 / (x * x)
    series = 1.0 + inv2 * (-1.0 + inv2 * (3.0 + inv2 * -15.0))
    return -0.5 * x * x - math.log(x) - 0.5 * math.log(2.0 * math.pi) + math.log(series)


def _reg_gamma_series(z: float, a: float) -> float:
    # P(a, z) by power series, reliable for z < a + 1.
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= z / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            return total * math.exp(-z + a * math.log(z) - math.lgamma(a))
    raise RuntimeError("incomplete gamma series failed to converge")


def _reg_gamma_cf(z: float, a: float) -> float:
    # Q(a, z) by modified-Lentz continued fraction, reliable for z >= a + 1.
    tiny = 1e-300
    b = z + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h * math.exp(-z + a * math.log(z) - math.lgamma(a))
    raise RuntimeError("incomplete gamma continued fraction failed to converge")


def lower_incomplete_gamma(z: float, a: float) -> float:
    """Non-regularized lower incomplete gamma integral over [0, z]."""
    if not a > 0.0:
        raise ValueError(f"lower_incomplete_gamma requires a > 0, got a={a}")
    if z < 0.0:
        raise ValueError(f"lower_incomplete_gamma requires z >= 0, got z={z}")
    if z == 0.0:
        return 0.0
    gamma_a = math.exp(math.lgamma(a))
    if math.isinf(z):
        return gamma_a
    if z < a + 1.0:
        return _reg_gamma_series(z, a) * gamma_a
    return (1.0 - _reg_gamma_cf(z, a)) * gamma_a


def _beta_head(z: float, a: float, b: float) -> float:
    # int_0^z t^(a-1)(1-t)^(b-1) dt with z <= 0.5, via the binomial series
    # (1-t)^(b-1) = sum c_n t^n, c_n = c_{n-1} (n-b)/n.
    if z == 0.0:
        return 0.0
    coef = 1.0
    power = math.exp(a * math.log(z))  # z^(a+n), updated in the loop
    total = power / a
    for n in range(1, _MAX_ITER):
        coef *= (n - b) / n
        power *= z
        term = coef * power / (a + n)
        total += term
        if abs(term) < abs(total) * _EPS:
            return total
    raise RuntimeError("incomplete beta head series failed to converge")


def _beta_tail(s0: float, a: float, b: float) -> float:
    # int_{s0}^{1/2} s^(b-1)(1-s)^(a-1) ds, i.e. the t in (1/2, 1-s0] part of
    # the beta integral after the substitution s = 1-t.  s0 = 0 requires b > 0.
    log_c = math.log(0.5)
    log_s0 = math.log(s0) if s0 > 0.0 else None
    coef = 1.0
    total = 0.0
    for n in range(_MAX_ITER):
        if n > 0:
            coef *= (n - a) / n
        eps = b + n
        if log_s0 is None:
            piece = math.exp(eps * log_c) / eps
        elif eps == 0.0:
            piece = log_c - log_s0
        else:
            piece = (math.expm1(eps * log_c) - math.expm1(eps * log_s0)) / eps
        term = coef * piece
        total += term
        if n > 4 and abs(term) < abs(total) * _EPS:
            return total
    raise RuntimeError("incomplete beta tail series failed to converge")


def _betacf(x: float, a: float, b: float) -> float:
    # Continued fraction for the regularized incomplete beta (NR-style
    # modified Lentz).  Requires a, b > 0 and x < (a+1)/(a+b+2).
    tiny = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise RuntimeError("incomplete beta continued fraction failed to converge")


def _reg_beta_pos(x: float, one_minus_x: float, a: float, b: float) -> float:
    # Regularized I_x(a, b) for a, b > 0, given both x and 1-x to full
    # precision.  Uses the standard symmetry to keep the CF convergent.
    if x == 0.0:
        return 0.0
    if one_minus_x == 0.0:
        return 1.0
    front = math.exp(
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log(one_minus_x)
    )
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(x, a, b) / a
    return 1.0 - front * _betacf(one_minus_x, b, a) / b


def _ln_beta(a: float, b: float) -> float:
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def _beta_nonpos_b(one_minus_z: float, a: float, b: float) -> float:
    # B(z; a, b) for b <= 0 and z > 1/2, by the downward recurrence
    #   B(z; a, b) = ((a+b)/b) B(z; a, b+1) - z^a (1-z)^b / b
    # started from a b + m in (0, 1].  Falls back to the split power series
    # when b sits on (or next to) a nonpositive integer, where the recurrence
    # divides by ~0.
    s0 = one_minus_z
    z = 1.0 - s0
    m = int(math.ceil(-b)) + 1
    if any(abs(b + j) < 1e-4 for j in range(m)):
        return _beta_head(0.5, a, b) + _beta_tail(s0, a, b)
    top = b + m
    cur = math.exp(_ln_beta(a, top)) * _reg_beta_pos(z, s0, a, top)
    log_z = math.log(z)
    log_s0 = math.log(s0)
    for j in range(m - 1, -1, -1):
        bj = b + j
        boundary = math.exp(a * log_z + bj * log_s0)
        cur = (a + bj) / bj * cur - boundary / bj
    return cur


def incomplete_beta(z: float, a: float, b: float) -> float:
    """Non-regularized incomplete beta integral over [0, z].

    Requires 0 <= z <= 1 and a > 0.  z = 1 is allowed only when b > 0 (the
    integral diverges at t = 1 otherwise).
    """
    if z < 0.0 or z > 1.0:
        raise ValueError(f"incomplete_beta requires 0 <= z <= 1, got z={z}")
    return incomplete_beta_compl(1.0 - z, a, b)


def incomplete_beta_compl(one_minus_z: float, a: float, b: float) -> float:
    """incomplete_beta(1 - one_minus_z, a, b), accurate for z near 1.

    Callers that know 1-z to full precision (e.g. from a logistic survival
    value) avoid the cancellation in forming z = 1 - (1-z).
    """
    if not a > 0.0:
        raise ValueError(f"incomplete_beta requires a > 0, got a={a}")
    s0 = one_minus_z
    if s0 < 0.0 or s0 > 1.0:
        raise ValueError(f"complement must lie in [0, 1], got {s0}")
    if s0 == 0.0 and b <= 0.0:
        raise ValueError("incomplete_beta diverges at z=1 when b <= 0")
    z = 1.0 - s0
    if z == 0.0:
        return 0.0
    # |b| near zero: the continued fraction (b > 0) and the recurrence
    # (b <= 0) both divide by ~b and cancel catastrophically; the expm1-based
    # series split is exact there.
    if b > 1e-4:
        return math.exp(_ln_beta(a, b)) * _reg_beta_pos(z, s0, a, b)
    if s0 == 0.0:
        return math.exp(_ln_beta(a, b))  # full integral, 0 < b <= 1e-4
    if s0 >= 0.5:
        return _beta_head(z, a, b)
    return _beta_nonpos_b(s0, a, b)
