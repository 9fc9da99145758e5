"""Paired two-tailed t-test with a self-contained Student t CDF.

The p-value comes from the regularized incomplete beta function evaluated
with the standard continued fraction (modified Lentz), good to ~1e-8 over
the degrees of freedom this package meets.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

_MAX_ITER = 300
_EPS = 3e-12
_FPMIN = 1e-300


def _betacf(a, b, x):
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ValidationError("incomplete beta continued fraction did not converge")


def reg_incomplete_beta(a, b, x):
    """I_x(a, b), regularized, for a, b > 0 and x in [0, 1]."""
    if a <= 0 or b <= 0:
        raise ValidationError("beta parameters must be positive")
    if x < 0.0 or x > 1.0:
        raise ValidationError("x must lie in [0, 1]")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_two_tailed_p(t, df):
    """P(|T_df| >= |t|) via the identity with I_x(df/2, 1/2)."""
    if df < 1:
        raise ValidationError("degrees of freedom must be >= 1")
    t = float(t)
    if not math.isfinite(t):
        return 0.0
    x = df / (df + t * t)
    return reg_incomplete_beta(df / 2.0, 0.5, x)


@dataclass
class TTestResult:
    t_statistic: float
    degrees_of_freedom: int
    p_value: float
    significant_at_99: bool
    degenerate: bool = False


def paired_ttest(a, b):
    """Two-tailed paired t-test on matched per-query values.

    Zero-variance differences are degenerate: p = 0 when the common
    difference is nonzero, p = 1 when the samples are identical.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValidationError("paired samples must be equal-length vectors")
    n = a.size
    if n < 2:
        raise ValidationError("paired t-test needs at least two pairs")

    d = a - b
    mean = float(d.mean())
    sd = float(d.std(ddof=1))
    df = n - 1
    if sd == 0.0:
        if mean == 0.0:
            return TTestResult(0.0, df, 1.0, False, degenerate=True)
        t = math.inf if mean > 0 else -math.inf
        return TTestResult(t, df, 0.0, True, degenerate=True)
    t = mean / (sd / math.sqrt(n))
    p = student_t_two_tailed_p(t, df)
    return TTestResult(float(t), df, float(p), bool(p < 0.01))
