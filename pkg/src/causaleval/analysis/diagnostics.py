"""
Regression diagnostics

Checks for OLS fits (linearity, normality, multicollinearity,
homoscedasticity, influence) and simulated quantile residuals for logit
fits. Every check returns a CheckResult whose verdict follows only from the
configured thresholds, together with plot-ready point series.

Linear-model residual checks are never applied to logit fits; those are
diagnosed through the simulated residuals only.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np
from scipy import stats

from ..config import DiagnosticsSettings, config
from ..errors import ConvergenceError, ModelError, UsageError
from ..models.design import DesignMatrix
from ..models.fits import LogitFit, OlsFit, SimulatedResiduals
from ..models.report import CheckResult, DiagnosticsReport
from .distributions import (
    kolmogorov_pvalue,
    ks_statistic,
    normal_cdf,
    normal_quantile,
    uniform_cdf,
)

logger = logging.getLogger(__name__)

MIN_SIMULATIONS = 50

# Leverages this close to 1 are treated as exact
_EXACT_LEVERAGE = 1e-10


def _pairs(x: np.ndarray, y: np.ndarray) -> list[tuple[float, float]]:
    return [(float(a), float(b)) for a, b in zip(x, y)]


def _not_applicable(name: str, reason: str) -> CheckResult:
    return CheckResult(name=name, verdict="pass", statistics={"applicable": False, "reason": reason})


def residual_vs_fitted(fit: OlsFit, bin_sigma: float = 3.0) -> CheckResult:
    """
    Residuals against fitted values with a binned-means linearity test

    Observations are sorted by ŷ and split into ⌊√n⌋ bins; the check fails
    when a bin's mean residual exceeds bin_sigma·s/√(bin size).
    """
    n = fit.n
    n_bins = max(1, math.isqrt(n))
    order = np.argsort(fit.fitted, kind="stable")
    bins = np.array_split(order, n_bins)

    centers, means, ratios = [], [], []
    for members in bins:
        mean = float(np.mean(fit.residuals[members]))
        centers.append(float(np.mean(fit.fitted[members])))
        means.append(mean)
        if fit.s > 0:
            ratios.append(abs(mean) * math.sqrt(len(members)) / fit.s)
        else:
            ratios.append(0.0)

    worst = max(ratios)
    verdict = "fail" if worst > bin_sigma else "pass"
    return CheckResult(
        name="residual_vs_fitted",
        verdict=verdict,
        statistics={"n_bins": n_bins, "max_bin_ratio": worst, "threshold": bin_sigma},
        points=_pairs(fit.fitted, fit.residuals),
        values={"bin_fitted": centers, "bin_mean_residual": means},
    )


def normality_check(fit: OlsFit, ks_alpha: float = 0.01) -> CheckResult:
    """
    Q-Q series of standardized residuals ε/s and a KS test against N(0, 1)

    A rejection only warns: the Q-Q series is the primary evidence.

    Raises:
        ModelError: n < 3 or an exact fit (s = 0)
    """
    if fit.n < 3:
        raise ModelError("normality check needs at least 3 observations")
    if fit.s == 0.0:
        raise ModelError("exact fit: residual standard error is 0, standardized residuals are undefined")

    n = fit.n
    standardized = np.sort(fit.residuals / fit.s)
    theoretical = normal_quantile((np.arange(1, n + 1) - 0.5) / n)
    d = ks_statistic(standardized, normal_cdf)
    p = kolmogorov_pvalue(d, n)
    return CheckResult(
        name="normality",
        verdict="warn" if p < ks_alpha else "pass",
        statistics={"ks_statistic": d, "ks_pvalue": p, "alpha": ks_alpha, "asymptotic": True},
        points=_pairs(theoretical, standardized),
    )


def variance_inflation(dm: DesignMatrix) -> dict[str, float]:
    """
    VIF_j = 1/(1 − R²_j) of every non-intercept column

    R²_j comes from regressing column j on all other columns, intercept
    included. Perfectly collinear columns get +inf.

    Raises:
        ModelError: fewer than two non-intercept columns
    """
    X = dm.matrix
    regressors = [j for j, meta in enumerate(dm.column_meta) if not meta.is_intercept]
    if len(regressors) < 2:
        raise ModelError("VIF needs at least two non-intercept columns")

    result = {}
    for j in regressors:
        target = X[:, j]
        others = np.delete(X, j, axis=1)
        coef, *_ = np.linalg.lstsq(others, target, rcond=None)
        rss = float(np.sum((target - others @ coef) ** 2))
        tss = float(np.sum((target - np.mean(target)) ** 2))
        unexplained = rss / tss if tss > 0 else 0.0
        result[dm.column_names[j]] = math.inf if unexplained <= 1e-12 else max(1.0, 1.0 / unexplained)
    return result


def vif(dm: DesignMatrix, vif_warn: float = 5.0, vif_fail: float = 10.0) -> CheckResult:
    """Variance inflation factors; warn above vif_warn, fail above vif_fail"""
    factors = variance_inflation(dm)
    largest = max(factors.values())
    verdict = "fail" if largest > vif_fail else "warn" if largest > vif_warn else "pass"
    return CheckResult(
        name="vif",
        verdict=verdict,
        statistics={**factors, "max_vif": largest},
        values={"vif": list(factors.values())},
    )


def _studentized(fit: OlsFit) -> tuple[np.ndarray, np.ndarray]:
    """Internally studentized residuals and the mask of usable observations"""
    usable = fit.hat_diag < 1.0 - _EXACT_LEVERAGE
    values = np.zeros(fit.n)
    if fit.s > 0:
        values[usable] = fit.residuals[usable] / (fit.s * np.sqrt(1.0 - fit.hat_diag[usable]))
    return values, usable


def scale_location(fit: OlsFit, rank_corr_z: float = 2.58) -> CheckResult:
    """
    ŷ against √|studentized residual| with a Spearman trend test

    Fails when |ρ| > rank_corr_z/√n. Observations with leverage 1 are
    flagged and left out of the series.
    """
    studentized, usable = _studentized(fit)
    x = fit.fitted[usable]
    y = np.sqrt(np.abs(studentized[usable]))
    n = int(usable.sum())

    if n < 3 or np.ptp(x) == 0.0 or np.ptp(y) == 0.0:
        rho = 0.0
    else:
        rho = float(stats.spearmanr(x, y)[0])
    threshold = rank_corr_z / math.sqrt(max(n, 1))
    return CheckResult(
        name="scale_location",
        verdict="fail" if abs(rho) > threshold else "pass",
        statistics={"spearman_rho": rho, "threshold": threshold},
        points=_pairs(x, y),
        flagged=[int(i) for i in np.flatnonzero(~usable)],
    )


def cooks_distance(fit: OlsFit) -> np.ndarray:
    """D_i = ε_i² H_ii / (K s² (1 − H_ii)²); +inf at leverage 1"""
    h = fit.hat_diag
    distance = np.zeros(fit.n)
    if fit.s2 == 0.0:
        return distance
    usable = h < 1.0 - _EXACT_LEVERAGE
    distance[usable] = (fit.residuals[usable] ** 2 * h[usable]) / (
        fit.n_coef * fit.s2 * (1.0 - h[usable]) ** 2
    )
    distance[~usable] = math.inf
    return distance


def influence(fit: OlsFit, leverage_factor: float = 2.0, cook_factor: float = 4.0) -> CheckResult:
    """
    Leverage and Cook's distance per observation

    Flags H_ii > leverage_factor·K/n or D_i > cook_factor/n; flagged points
    make the verdict warn.
    """
    n, k = fit.n, fit.n_coef
    leverage = fit.hat_diag
    distance = cooks_distance(fit)
    studentized, _ = _studentized(fit)
    leverage_cut = leverage_factor * k / n
    cook_cut = cook_factor / n
    flagged = np.flatnonzero((leverage > leverage_cut) | (distance > cook_cut))

    return CheckResult(
        name="influence",
        verdict="warn" if flagged.size else "pass",
        statistics={
            "leverage_threshold": leverage_cut,
            "cook_threshold": cook_cut,
            "max_leverage": float(np.max(leverage)),
            "max_cooks_distance": float(np.max(distance)),
            "n_flagged": int(flagged.size),
        },
        points=_pairs(leverage, studentized),
        values={
            "leverage": [float(v) for v in leverage],
            "cooks_distance": [float(v) for v in distance],
        },
        flagged=[int(i) for i in flagged],
    )


def _simulate_chunk(
    indices: np.ndarray,
    prob: np.ndarray,
    y: np.ndarray,
    n_sim: int,
    seed: int,
    closed_form_min_sim: int,
) -> np.ndarray:
    out = np.empty(indices.shape[0])
    for slot, i in enumerate(indices):
        # Stream per observation, so chunking never changes the draws
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(int(i),)))
        p = float(prob[i])
        if n_sim >= closed_form_min_sim:
            zeros = int(rng.binomial(n_sim, 1.0 - p))
        else:
            zeros = int(n_sim - np.count_nonzero(rng.random(n_sim) < p))
        below = zeros / n_sim
        # F(0−) = 0, F(0) = F(1−) = zeros/n_sim, F(1) = 1
        low, high = (below, 1.0) if y[i] == 1.0 else (0.0, below)
        out[slot] = rng.uniform(low, high) if high > low else low
    return out


def simulate_quantile_residuals(
    fit: LogitFit,
    n_sim: int = 250,
    seed: int = 42,
    workers: int = 1,
    closed_form_min_sim: int = 1000,
) -> SimulatedResiduals:
    """
    Randomized quantile residuals of a logit fit

    For each observation n_sim Bernoulli(p̂_i) replicates are simulated and
    u_i is drawn uniformly on [F̂_i(y_i−), F̂_i(y_i)] of the simulated CDF.
    Once n_sim reaches closed_form_min_sim the zero count is drawn from its
    binomial law directly. Each observation draws from its own stream
    derived from (seed, index), so results do not depend on workers.
    Uniformity is tested with the asymptotic KS law.
    """
    if n_sim < MIN_SIMULATIONS:
        raise UsageError(f"n_sim must be at least {MIN_SIMULATIONS}, got {n_sim}")
    if not fit.converged:
        raise ConvergenceError("simulated residuals need a converged logit fit")

    n = fit.n
    y = fit.design.require_response()
    chunks = np.array_split(np.arange(n), max(1, min(workers, n)))
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        parts = executor.map(
            lambda idx: _simulate_chunk(idx, fit.fitted_prob, y, n_sim, seed, closed_form_min_sim),
            chunks,
        )
        quantiles = np.concatenate(list(parts))

    d = ks_statistic(quantiles, uniform_cdf)
    p = kolmogorov_pvalue(d, n)
    logger.info(f"Simulated quantile residuals: n={n}, n_sim={n_sim}, seed={seed}, KS p={p:.4g}")
    return SimulatedResiduals(quantiles=quantiles, n_sim=n_sim, seed=seed, ks_statistic=d, ks_pvalue=p)


def simulated_residuals_check(
    fit: LogitFit,
    n_sim: int = 250,
    seed: int = 42,
    workers: int = 1,
    ks_alpha: float = 0.01,
    closed_form_min_sim: int = 1000,
) -> CheckResult:
    """Uniformity of the simulated quantile residuals; fails when KS rejects at ks_alpha"""
    residuals = simulate_quantile_residuals(fit, n_sim, seed, workers, closed_form_min_sim)
    u = residuals.quantiles
    return CheckResult(
        name="simulated_residuals",
        verdict="fail" if residuals.ks_pvalue < ks_alpha else "pass",
        statistics={
            "ks_statistic": residuals.ks_statistic,
            "ks_pvalue": residuals.ks_pvalue,
            "alpha": ks_alpha,
            "n_sim": n_sim,
            "seed": seed,
            "mean": float(np.mean(u)),
            "variance": float(np.var(u)),
            "mean_tolerance": 3.0 / math.sqrt(12.0 * fit.n),
            "asymptotic": True,
        },
        points=_pairs(fit.fitted_prob, u),
        values={"quantiles": [float(v) for v in u]},
    )


def _vif_or_skip(dm: DesignMatrix, settings: DiagnosticsSettings) -> CheckResult:
    regressors = sum(1 for meta in dm.column_meta if not meta.is_intercept)
    if regressors < 2:
        return _not_applicable("vif", "fewer than two non-intercept columns")
    return vif(dm, settings.vif_warn, settings.vif_fail)


def ols_suite(fit: OlsFit, settings: Optional[DiagnosticsSettings] = None) -> DiagnosticsReport:
    """All linear-model checks, each present exactly once"""
    settings = settings or config.diagnostics
    if fit.s == 0.0 or fit.n < 3:
        normality = _not_applicable("normality", "exact fit: residual standard error is 0")
    else:
        normality = normality_check(fit, settings.ks_alpha)

    checks = [
        residual_vs_fitted(fit, settings.bin_sigma),
        normality,
        _vif_or_skip(fit.design, settings),
        scale_location(fit, settings.rank_corr_z),
        influence(fit, settings.leverage_factor, settings.cook_factor),
    ]
    logger.info(f"OLS diagnostics of {fit.design.formula}: " + ", ".join(f"{c.name}={c.verdict}" for c in checks))
    return DiagnosticsReport(formula=str(fit.design.formula), family="ols", checks=checks)


def logit_suite(
    fit: LogitFit,
    n_sim: int = 250,
    seed: int = 42,
    workers: int = 1,
    settings: Optional[DiagnosticsSettings] = None,
) -> DiagnosticsReport:
    """Simulated quantile residuals plus the design-only VIF check"""
    settings = settings or config.diagnostics
    checks = [
        simulated_residuals_check(
            fit, n_sim, seed, workers, settings.ks_alpha, settings.closed_form_min_sim
        ),
        _vif_or_skip(fit.design, settings),
    ]
    logger.info(f"Logit diagnostics of {fit.design.formula}: " + ", ".join(f"{c.name}={c.verdict}" for c in checks))
    return DiagnosticsReport(formula=str(fit.design.formula), family="logit", checks=checks)
