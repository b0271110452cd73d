"""
Ordinary least squares

The fit goes through a thin QR factorization X = QR: β̂ solves Rβ = Qᵀy,
leverages are the row norms of Q and (XᵀX)⁻¹ = R⁻¹R⁻ᵀ. The normal
equations are never formed.
"""

import logging
import math
from typing import Union

import numpy as np
from scipy import linalg

from ..errors import DataError, ModelError, RankDeficiencyError
from ..models.dataset import Dataset
from ..models.design import DesignMatrix
from ..models.fits import OlsFit
from ..models.report import CoefficientRow, CoefficientTable
from .distributions import f_sf, student_cdf, student_quantile
from .formula import encode_rows

logger = logging.getLogger(__name__)

_EPS = float(np.finfo(np.float64).eps)


def _negligible(ss: float, n: int, scale: float, k: int = 1) -> bool:
    """
    A sum of squares of n terms each within rounding noise of its operands

    scale bounds the magnitude of the values subtracted per row; k is the
    number of products summed into each of them.
    """
    return ss <= n * (10.0 * k * _EPS * scale) ** 2


def qr_factor(matrix: np.ndarray, column_names, rank_tol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    """Thin QR of a full-column-rank matrix; raises RankDeficiencyError otherwise"""
    q, r = linalg.qr(matrix, mode="economic")
    pivots = np.abs(np.diag(r))
    largest = float(pivots.max()) if pivots.size else 0.0
    deficient = np.flatnonzero(pivots <= rank_tol * largest) if largest > 0 else np.arange(pivots.size)
    if deficient.size:
        raise RankDeficiencyError(column_names[int(deficient[0])])
    return q, r


def fit(dm: DesignMatrix, rank_tol: float = 1e-10) -> OlsFit:
    """
    Fit y = Xβ + ε by least squares

    Args:
        dm: design matrix with a response vector
        rank_tol: relative tolerance on |R_jj| for the rank check

    Returns:
        OlsFit with coefficients, covariance s²(XᵀX)⁻¹, residuals,
        leverages and fit statistics (df_resid = n − K, K counting the intercept)

    Raises:
        ModelError: n ≤ K
        RankDeficiencyError: perfect multicollinearity; names the first
            column that is a linear combination of the preceding ones
    """
    X = dm.matrix
    y = dm.require_response()
    n, k = X.shape
    if n <= k:
        raise ModelError(f"{n} observations do not exceed the {k} design columns")

    q, r = qr_factor(X, dm.column_names, rank_tol)
    beta = linalg.solve_triangular(r, q.T @ y)
    fitted = X @ beta
    residuals = y - fitted
    hat_diag = np.clip(np.sum(q * q, axis=1), 0.0, 1.0)

    r_inv = linalg.solve_triangular(r, np.eye(k))
    xtx_inv = r_inv @ r_inv.T

    df_resid = n - k
    rss = float(residuals @ residuals)
    # Rounding in y − Xβ is relative to |y_i| + Σ|X_ij β_j|, not to the residual itself
    residual_scale = float(np.max(np.abs(y) + np.abs(X) @ np.abs(beta)))
    if _negligible(rss, n, residual_scale, k):
        rss = 0.0
    s2 = rss / df_resid

    tss = float(np.sum((y - np.mean(y)) ** 2))
    if _negligible(tss, n, float(np.max(np.abs(y)))):
        tss = 0.0
    r2 = min(1.0, max(0.0, 1.0 - rss / tss)) if tss > 0 else 0.0
    r2_adj = 1.0 - (1.0 - r2) * (n - 1) / df_resid

    f_statistic = f_pvalue = None
    if k > 1 and tss > 0:
        if s2 > 0:
            f_statistic = max(tss - rss, 0.0) / (k - 1) / s2
            f_pvalue = f_sf(f_statistic, k - 1, df_resid)
        else:
            f_statistic, f_pvalue = math.inf, 0.0

    loglik = math.inf if rss == 0 else -0.5 * n * (math.log(2.0 * math.pi * rss / n) + 1.0)

    logger.info(f"OLS fit of {dm.formula}: n={n}, K={k}, R2={r2:.4f}")
    return OlsFit(
        design=dm,
        beta_hat=beta,
        cov_beta=s2 * xtx_inv,
        xtx_inv=xtx_inv,
        residuals=residuals,
        fitted=fitted,
        hat_diag=hat_diag,
        s2=s2,
        df_resid=df_resid,
        rss=rss,
        tss=tss,
        r2=r2,
        r2_adj=r2_adj,
        loglik=loglik,
        f_statistic=f_statistic,
        f_pvalue=f_pvalue,
    )


def coef_table(fit: OlsFit, alpha: float = 0.05, null_value: float = 0.0) -> CoefficientTable:
    """
    t-tests of H₀: β_k = null_value with two-sided p-values and (1 − α) intervals

    Rows whose standard error is zero are flagged degenerate and carry no
    statistic or p-value.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")

    t_crit = student_quantile(1.0 - alpha / 2.0, fit.df_resid)
    rows = []
    for name, estimate, variance in zip(fit.column_names, fit.beta_hat, np.diag(fit.cov_beta)):
        estimate = float(estimate)
        se = math.sqrt(max(float(variance), 0.0))
        if se == 0.0:
            rows.append(
                CoefficientRow(
                    name=name, estimate=estimate, std_error=0.0,
                    ci_low=estimate, ci_high=estimate, degenerate=True,
                )
            )
            continue
        t = (estimate - null_value) / se
        rows.append(
            CoefficientRow(
                name=name,
                estimate=estimate,
                std_error=se,
                statistic=t,
                p_value=min(1.0, 2.0 * student_cdf(-abs(t), fit.df_resid)),
                ci_low=estimate - t_crit * se,
                ci_high=estimate + t_crit * se,
            )
        )

    return CoefficientTable(
        formula=str(fit.design.formula),
        family="ols",
        alpha=alpha,
        n=fit.n,
        df_resid=fit.df_resid,
        null_value=null_value,
        rows=rows,
        centering=dict(fit.design.centering),
        fit_statistics={
            "r2": fit.r2,
            "r2_adj": fit.r2_adj,
            "residual_std_error": fit.s,
            "rss": fit.rss,
            "f_statistic": fit.f_statistic,
            "f_pvalue": fit.f_pvalue,
            "loglik": fit.loglik,
        },
    )


def predict(fit: OlsFit, newrows: Union[Dataset, np.ndarray]) -> np.ndarray:
    """
    ŷ = X_new β̂ for rows encoded like the training design

    newrows is either a Dataset (encoded with the fitted levels and terms) or
    an already encoded matrix with the fitted column count.
    """
    if isinstance(newrows, Dataset):
        X = encode_rows(fit.design, newrows)
    else:
        X = np.atleast_2d(np.asarray(newrows, dtype=np.float64))
        if X.shape[1] != fit.n_coef:
            raise DataError(
                f"column mismatch: {X.shape[1]} columns given, the fitted design has {fit.n_coef}"
            )
    return X @ fit.beta_hat
