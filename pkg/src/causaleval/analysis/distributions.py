"""
Distribution kernel

CDFs, quantiles and p-values used by the inference code: standard normal,
Student t (through the regularized incomplete beta function), Fisher F and
the asymptotic Kolmogorov law. All functions are pure.
"""

import math
from typing import Callable

import numpy as np
from scipy import optimize, special

_SQRT2 = math.sqrt(2.0)


def _check_probability(p: float) -> float:
    p = float(p)
    if not 0.0 < p < 1.0:
        raise ValueError(f"probability must lie in (0, 1), got {p!r}")
    return p


def _check_df(df: float) -> float:
    df = float(df)
    if not df > 0.0:
        raise ValueError(f"degrees of freedom must be positive, got {df!r}")
    return df


def normal_cdf(x):
    """Φ(x) via the complementary error function; accepts scalars or arrays"""
    result = 0.5 * special.erfc(-np.asarray(x, dtype=np.float64) / _SQRT2)
    return float(result) if np.ndim(result) == 0 else result


def normal_quantile(p):
    """Inverse of normal_cdf on (0, 1); accepts scalars or arrays"""
    if np.ndim(p) == 0:
        return float(special.ndtri(_check_probability(p)))
    p = np.asarray(p, dtype=np.float64)
    if not np.all((p > 0.0) & (p < 1.0)):
        raise ValueError("probabilities must lie in (0, 1)")
    return special.ndtri(p)


def student_cdf(x: float, df: float) -> float:
    """P(T ≤ x) for T ~ t(df)

    Uses P(|T| > |x|) = I_{df/(df+x²)}(df/2, 1/2).
    """
    df = _check_df(df)
    x = float(x)
    if math.isinf(x):
        return 1.0 if x > 0 else 0.0
    tail = 0.5 * float(special.betainc(0.5 * df, 0.5, df / (df + x * x)))
    return 1.0 - tail if x > 0 else tail


def student_quantile(p: float, df: float) -> float:
    """Inverse of student_cdf, found by bracketed root finding"""
    p = _check_probability(p)
    df = _check_df(df)
    if p == 0.5:
        return 0.0
    if p < 0.5:
        return -student_quantile(1.0 - p, df)

    def excess(x: float) -> float:
        return student_cdf(x, df) - p

    # The t quantile is never below the normal one for p > 1/2
    low = normal_quantile(p)
    if excess(low) >= 0.0:
        return low
    high = max(2.0 * low, 1.0)
    while excess(high) < 0.0:
        low, high = high, 2.0 * high
    return float(optimize.brentq(excess, low, high, xtol=1e-12, rtol=4 * np.finfo(float).eps, maxiter=500))


def f_sf(f: float, df_num: float, df_den: float) -> float:
    """P(F > f) for F ~ F(df_num, df_den)"""
    df_num = _check_df(df_num)
    df_den = _check_df(df_den)
    if f <= 0.0:
        return 1.0
    return float(special.fdtrc(df_num, df_den, f))


def kolmogorov_pvalue(d: float, n: int) -> float:
    """
    Asymptotic p-value of a one-sample KS statistic

    p = 2 Σ_{k≥1} (−1)^{k−1} exp(−2 k² n d²), clamped to [0, 1].
    """
    if n < 1:
        raise ValueError(f"sample size must be at least 1, got {n}")
    if d <= 0.0:
        return 1.0
    p = float(special.kolmogorov(math.sqrt(n) * float(d)))
    return min(1.0, max(0.0, p))


def ks_statistic(sample: np.ndarray, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """sup |F_n − F| of the sample against a continuous reference CDF"""
    x = np.sort(np.asarray(sample, dtype=np.float64))
    n = x.shape[0]
    if n == 0:
        raise ValueError("KS statistic of an empty sample")
    fx = np.asarray(cdf(x), dtype=np.float64)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - fx), np.max(fx - (i - 1) / n), 0.0))


def uniform_cdf(x: np.ndarray) -> np.ndarray:
    return np.clip(np.asarray(x, dtype=np.float64), 0.0, 1.0)
