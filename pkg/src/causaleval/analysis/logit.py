"""
Logit regression by maximum likelihood

P(Y = 1 | x) = σ(xβ). β̂ maximizes the summed log-likelihood by
Newton-Raphson with step halving, started at β = 0; ℓ is globally concave so
the start point is irrelevant whenever the MLE exists. The coefficient
covariance is the inverse observed information (XᵀWX)⁻¹ of the summed
log-likelihood, which gives the same intervals as the per-observation
convention divided by n.
"""

import logging
import math
from typing import Iterable, Optional, Union

import numpy as np
from scipy import linalg, optimize, special

from ..errors import ConvergenceError, DataError, ModelError, SeparationError
from ..models.dataset import Column, Dataset
from ..models.design import DesignMatrix
from ..models.fits import LogitFit
from ..models.report import (
    CoefficientRow,
    CoefficientTable,
    MarginalEffectRow,
    MarginalEffectsTable,
    OddsRatioRow,
)
from .distributions import normal_cdf, normal_quantile
from .formula import encode_rows
from .ols import qr_factor

logger = logging.getLogger(__name__)

# |y − p| below this for every observation means the classes are separated
_PERFECT_FIT = 1e-6

# Relative size of the LP objective that counts as a separating direction
_SEPARATION_LP_TOL = 1e-8


def _binary_response(dm: DesignMatrix) -> np.ndarray:
    y = dm.require_response()
    if not np.all((y == 0.0) | (y == 1.0)):
        raise DataError(f"response '{dm.formula.response}' must be coded 0/1 for a logit model")
    return y


def _loglik(X: np.ndarray, y: np.ndarray, beta: np.ndarray) -> float:
    eta = X @ beta
    # y·η − log(1 + e^η), stable for any |η|
    return float(np.sum(y * eta - np.logaddexp(0.0, eta)))


def log_likelihood(beta: np.ndarray, dm: DesignMatrix) -> float:
    """ℓ(β) = Σ y_i log σ(x_iβ) + (1 − y_i) log(1 − σ(x_iβ))"""
    return _loglik(dm.matrix, _binary_response(dm), np.asarray(beta, dtype=np.float64))


def gradient(beta: np.ndarray, dm: DesignMatrix) -> np.ndarray:
    """∇ℓ(β) = Xᵀ(y − p)"""
    y = _binary_response(dm)
    p = special.expit(dm.matrix @ np.asarray(beta, dtype=np.float64))
    return dm.matrix.T @ (y - p)


def hessian(beta: np.ndarray, dm: DesignMatrix) -> np.ndarray:
    """∇²ℓ(β) = −XᵀWX with W = diag(p(1 − p))"""
    _binary_response(dm)
    X = dm.matrix
    p = special.expit(X @ np.asarray(beta, dtype=np.float64))
    return -(X.T @ ((p * (1.0 - p))[:, None] * X))


def null_loglik(y: np.ndarray) -> float:
    """Maximized intercept-only log-likelihood n[ȳ log ȳ + (1 − ȳ) log(1 − ȳ)]"""
    n = y.shape[0]
    ybar = float(np.mean(y))
    return n * (special.xlogy(ybar, ybar) + special.xlogy(1.0 - ybar, 1.0 - ybar))


def separation_kind(X: np.ndarray, y: np.ndarray) -> Optional[str]:
    """
    "complete" or "quasi-complete" when some b ≠ 0 has (2y − 1)·Xb ≥ 0 on every row

    Two linear programs over the box |b_j| ≤ 1: the largest common margin t
    with (2y_i − 1) x_i b ≥ t (complete when t > 0), then max Σ (2y_i − 1) x_i b
    subject to every margin ≥ 0 (quasi-complete when positive). Returns None
    when the classes overlap or the solver gives no answer.
    """
    n, k = X.shape
    signed = (2.0 * y - 1.0)[:, None] * X
    box = [(-1.0, 1.0)] * k

    strict = optimize.linprog(
        np.r_[np.zeros(k), -1.0],
        A_ub=np.hstack([-signed, np.ones((n, 1))]),
        b_ub=np.zeros(n),
        bounds=box + [(0.0, None)],
        method="highs",
    )
    if strict.status == 0 and -strict.fun > _SEPARATION_LP_TOL * float(np.max(np.abs(X))):
        return "complete"

    weak = optimize.linprog(-signed.sum(axis=0), A_ub=-signed, b_ub=np.zeros(n), bounds=box, method="highs")
    if weak.status != 0:
        logger.debug(f"Separation LP ended with status {weak.status}: {weak.message}")
        return None
    if -weak.fun > _SEPARATION_LP_TOL * float(np.sum(np.abs(X))):
        return "quasi-complete"
    return None


def fit_logit(
    dm: DesignMatrix,
    max_iter: int = 100,
    grad_tol: float = 1e-8,
    rel_tol: float = 1e-12,
    max_halvings: int = 30,
    separation_bound: float = 30.0,
    rank_tol: float = 1e-10,
) -> LogitFit:
    """
    Maximum-likelihood logit fit

    Converged when max|∇ℓ| ≤ grad_tol, or when a full Newton step changes ℓ
    by at most rel_tol relatively (followed by one polishing step).

    Raises:
        DataError: response not 0/1, or a single class
        ModelError: n ≤ K
        RankDeficiencyError: perfect multicollinearity
        SeparationError: the MLE does not exist
    """
    X = dm.matrix
    y = _binary_response(dm)
    n, k = X.shape
    if np.all(y == y[0]):
        raise DataError(f"response '{dm.formula.response}' has a single class; both 0 and 1 are required")
    if n <= k:
        raise ModelError(f"{n} observations do not exceed the {k} design columns")
    qr_factor(X, dm.column_names, rank_tol)
    kind = separation_kind(X, y)
    if kind is not None:
        raise SeparationError(f"separation: {kind} separation of the response; the logit MLE does not exist")

    beta = np.zeros(k)
    ll = _loglik(X, y, beta)
    converged = polishing = False
    iterations = 0

    for iterations in range(1, max_iter + 1):
        p = special.expit(X @ beta)
        grad = X.T @ (y - p)
        if np.max(np.abs(grad)) <= grad_tol:
            converged = True
            break

        info = X.T @ ((p * (1.0 - p))[:, None] * X)
        try:
            step = linalg.cho_solve(linalg.cho_factor(info), grad)
        except linalg.LinAlgError:
            raise SeparationError(
                "separation: the information matrix is numerically singular; the logit MLE does not exist"
            ) from None

        scale = 1.0
        for _ in range(max_halvings + 1):
            candidate = beta + scale * step
            ll_candidate = _loglik(X, y, candidate)
            if ll_candidate >= ll:
                break
            scale *= 0.5
        else:
            logger.debug(f"Step halving exhausted at iteration {iterations}")
            break

        change = abs(ll_candidate - ll) / max(abs(ll), np.finfo(float).tiny)
        beta, ll = candidate, ll_candidate
        logger.debug(f"Newton iteration {iterations}: loglik={ll!r}, step scale={scale}")

        if polishing:
            converged = True
            break
        if scale == 1.0 and change <= rel_tol:
            polishing = True

    p = special.expit(X @ beta)
    grad_norm = float(np.max(np.abs(X.T @ (y - p))))
    if not converged and grad_norm <= grad_tol:
        converged = True

    beta_max = float(np.max(np.abs(beta)))
    if not converged and beta_max > separation_bound:
        raise SeparationError(
            f"separation: coefficients diverge (max |beta| = {beta_max:.3g}) without convergence;"
            " the logit MLE does not exist"
        )
    # Large coefficients alone are fine once converged: they follow the regressor scale
    if converged and float(np.max(np.abs(y - p))) < _PERFECT_FIT:
        raise SeparationError(
            "separation: the fitted probabilities reproduce the response exactly; the logit MLE does not exist"
        )

    info = X.T @ ((p * (1.0 - p))[:, None] * X)
    try:
        info_inv = linalg.cho_solve(linalg.cho_factor(info), np.eye(k))
    except linalg.LinAlgError:
        raise SeparationError(
            "separation: the information matrix is numerically singular; the logit MLE does not exist"
        ) from None
    info_inv = 0.5 * (info_inv + info_inv.T)

    if converged:
        logger.info(f"Logit fit of {dm.formula} converged in {iterations} iterations (loglik {ll:.6f})")
    else:
        logger.warning(f"Logit fit of {dm.formula} did not converge after {iterations} iterations")

    return LogitFit(
        design=dm,
        beta_hat=beta,
        info_inv=info_inv,
        fitted_prob=p,
        loglik_full=ll,
        loglik_null=null_loglik(y),
        converged=converged,
        iterations=iterations,
        grad_norm=grad_norm,
    )


def _require_converged(fit: LogitFit) -> None:
    if not fit.converged:
        raise ConvergenceError(
            f"logit fit did not converge after {fit.iterations} iterations (max |gradient| {fit.grad_norm:.3g})"
        )


def mcfadden_r2(fit: LogitFit) -> float:
    """1 − ℓ_full/ℓ_null; exactly 0 for the intercept-only model"""
    _require_converged(fit)
    if fit.loglik_null == 0.0:
        raise ModelError("null log-likelihood is 0; the response is constant")
    if fit.n_coef == 1:
        return 0.0
    return max(0.0, 1.0 - fit.loglik_full / fit.loglik_null)


def coef_table_logit(fit: LogitFit, alpha: float = 0.05) -> CoefficientTable:
    """Wald z-tests, normal-quantile intervals and odds ratios"""
    _require_converged(fit)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")

    z_crit = normal_quantile(1.0 - alpha / 2.0)
    rows, odds = [], []
    for name, estimate, variance in zip(fit.column_names, fit.beta_hat, np.diag(fit.info_inv)):
        estimate = float(estimate)
        se = math.sqrt(max(float(variance), 0.0))
        z = estimate / se
        low, high = estimate - z_crit * se, estimate + z_crit * se
        rows.append(
            CoefficientRow(
                name=name,
                estimate=estimate,
                std_error=se,
                statistic=z,
                p_value=min(1.0, 2.0 * normal_cdf(-abs(z))),
                ci_low=low,
                ci_high=high,
            )
        )
        odds.append(
            OddsRatioRow(name=name, odds_ratio=math.exp(estimate), ci_low=math.exp(low), ci_high=math.exp(high))
        )

    return CoefficientTable(
        formula=str(fit.design.formula),
        family="logit",
        alpha=alpha,
        n=fit.n,
        df_resid=fit.n - fit.n_coef,
        rows=rows,
        odds_ratios=odds,
        centering=dict(fit.design.centering),
        fit_statistics={
            "loglik": fit.loglik_full,
            "loglik_null": fit.loglik_null,
            "mcfadden_r2": mcfadden_r2(fit),
            "iterations": fit.iterations,
            "converged": fit.converged,
        },
    )


def _resolve_column(dm: DesignMatrix, column: Union[str, int]) -> int:
    if isinstance(column, str):
        index = dm.index_of(column)
    else:
        index = int(column)
        if not 0 <= index < dm.n_columns:
            raise DataError(f"design column index {index} out of range")
    if dm.column_meta[index].is_intercept:
        raise DataError("the intercept has no marginal effect")
    return index


def _with_level(ds: Dataset, variable: str, level: str) -> Dataset:
    columns = tuple(
        Column(c.name, c.kind, np.full(ds.n, level, dtype=object)) if c.name == variable else c
        for c in ds.columns
    )
    return Dataset(columns, ds.centering)


def ame_with_gradient(
    dm: DesignMatrix, beta: np.ndarray, column: Union[str, int]
) -> tuple[float, np.ndarray, str]:
    """
    Average marginal effect of one design column at β and its gradient in β

    Continuous columns use the derivative form mean(p(1 − p))·β_k. A dummy
    column uses the discrete difference mean(σ(X₁β) − σ(X₀β)), where X₁ sets
    the whole factor to the column's level and X₀ to the reference level,
    with product columns recomputed.

    Returns:
        (ame, gradient, kind) with kind "derivative" or "discrete"
    """
    index = _resolve_column(dm, column)
    beta = np.asarray(beta, dtype=np.float64)
    meta = dm.column_meta[index]

    if meta.is_dummy:
        if dm.data is None:
            raise ModelError("discrete marginal effects need the source rows of the design")
        variable, level = meta.dummies[0]
        reference = dm.levels[variable][0]
        x1 = encode_rows(dm, _with_level(dm.data, variable, level))
        x0 = encode_rows(dm, _with_level(dm.data, variable, reference))
        p1, p0 = special.expit(x1 @ beta), special.expit(x0 @ beta)
        ame = float(np.mean(p1 - p0))
        grad = np.mean((p1 * (1.0 - p1))[:, None] * x1 - (p0 * (1.0 - p0))[:, None] * x0, axis=0)
        return ame, grad, "discrete"

    X = dm.matrix
    p = special.expit(X @ beta)
    w = p * (1.0 - p)
    ame = float(np.mean(w) * beta[index])
    # d w / d η = w (1 − 2p)
    grad = beta[index] * np.mean((w * (1.0 - 2.0 * p))[:, None] * X, axis=0)
    grad[index] += np.mean(w)
    return ame, grad, "derivative"


def average_marginal_effect(
    fit: LogitFit, column: Union[str, int], alpha: float = 0.05
) -> MarginalEffectRow:
    """AME of one column with a delta-method (1 − α) interval"""
    _require_converged(fit)
    ame, grad, kind = ame_with_gradient(fit.design, fit.beta_hat, column)
    se = math.sqrt(max(float(grad @ fit.info_inv @ grad), 0.0))
    z_crit = normal_quantile(1.0 - alpha / 2.0)
    name = fit.column_names[_resolve_column(fit.design, column)]
    return MarginalEffectRow(
        name=name,
        ame=ame,
        std_error=se,
        ci_low=ame - z_crit * se,
        ci_high=ame + z_crit * se,
        kind=kind,
    )


def marginal_effects_table(
    fit: LogitFit, columns: Optional[Iterable[Union[str, int]]] = None, alpha: float = 0.05
) -> MarginalEffectsTable:
    """AMEs of the given columns, or of every non-intercept column"""
    _require_converged(fit)
    columns = list(columns or [])
    if not columns:
        columns = [m.name for m in fit.design.column_meta if not m.is_intercept]
    rows = [average_marginal_effect(fit, column, alpha) for column in columns]
    return MarginalEffectsTable(formula=str(fit.design.formula), alpha=alpha, rows=rows)


def predict_proba(fit: LogitFit, newrows: Union[Dataset, np.ndarray]) -> np.ndarray:
    """σ(X_new β̂) for rows encoded like the training design"""
    if isinstance(newrows, Dataset):
        X = encode_rows(fit.design, newrows)
    else:
        X = np.atleast_2d(np.asarray(newrows, dtype=np.float64))
        if X.shape[1] != fit.n_coef:
            raise DataError(
                f"column mismatch: {X.shape[1]} columns given, the fitted design has {fit.n_coef}"
            )
    return special.expit(X @ fit.beta_hat)
