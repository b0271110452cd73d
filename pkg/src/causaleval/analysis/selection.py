"""
AIC model comparison

AIC = 2K − 2ℓ. For OLS, ℓ is the maximized Gaussian log-likelihood with
σ̂² = RSS/n and K counts the coefficients plus one for σ²; for logit, ℓ is
the maximized log-likelihood and K counts the coefficients.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Mapping, Optional, Sequence, Tuple, Union

from ..config import LogitSettings, OlsSettings, config
from ..errors import CausalEvalError, DataError, UsageError
from ..models.dataset import Dataset
from ..models.formula import ModelFormula
from ..models.report import ComparisonRow, ComparisonTable, Family
from . import logit, ols
from .formula import as_formula, build_design_matrix

logger = logging.getLogger(__name__)

# ΔAIC below this marks a candidate as competitive with the best
COMPETITIVE_DELTA = 2.0

Candidate = Tuple[Union[ModelFormula, str], Family]


def aic(k_params: int, loglik: float) -> float:
    """2K − 2ℓ"""
    if k_params < 1:
        raise ValueError(f"k_params must be at least 1, got {k_params}")
    return 2.0 * k_params - 2.0 * loglik


def _fit_candidate(
    formula: ModelFormula,
    family: Family,
    ds: Dataset,
    reference_levels: Optional[Mapping[str, str]],
    ols_settings: OlsSettings,
    logit_settings: LogitSettings,
) -> ComparisonRow:
    try:
        dm = build_design_matrix(formula, ds, reference_levels)
        if family == "ols":
            fit = ols.fit(dm, rank_tol=ols_settings.rank_tol)
            k, loglik, statistic = fit.n_coef + 1, fit.loglik, fit.r2_adj
        else:
            fit = logit.fit_logit(dm, rank_tol=ols_settings.rank_tol, **logit_settings.model_dump())
            k, loglik, statistic = fit.n_coef, fit.loglik_full, logit.mcfadden_r2(fit)
    except CausalEvalError as e:
        logger.warning(f"Candidate {formula} could not be fitted: {e}")
        return ComparisonRow(formula=str(formula), family=family, error=str(e))

    return ComparisonRow(
        formula=str(formula),
        family=family,
        n_params=k,
        loglik=loglik,
        aic=aic(k, loglik),
        fit_statistic=statistic,
    )


def _delta(value: float, best: float) -> float:
    if math.isinf(best):
        return 0.0 if value == best else math.inf
    return value - best


def compare(
    candidates: Sequence[Candidate],
    ds: Dataset,
    reference_levels: Optional[Mapping[str, str]] = None,
    workers: int = 1,
    ols_settings: Optional[OlsSettings] = None,
    logit_settings: Optional[LogitSettings] = None,
) -> ComparisonTable:
    """
    Fit every candidate and rank the successful fits by AIC

    Ties are broken by fewer parameters, then by formula string. Candidates
    whose fit fails are reported with their error after the ranked rows.
    Fitting tolerances default to the configured OLS and logit settings.

    Raises:
        UsageError: empty candidate list or mixed model families
        DataError: candidates with differing responses
    """
    if not candidates:
        raise UsageError("empty candidate list")
    families = {family for _, family in candidates}
    if len(families) > 1:
        raise UsageError("mixed-family comparison: OLS and logit likelihoods are not commensurable")
    family = families.pop()
    ols_settings = ols_settings or config.ols
    logit_settings = logit_settings or config.logit

    formulas = [as_formula(f) for f, _ in candidates]
    responses = sorted({f.response for f in formulas})
    if len(responses) > 1:
        raise DataError(f"candidates have differing responses: {responses}")

    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        rows = list(
            executor.map(
                lambda f: _fit_candidate(f, family, ds, reference_levels, ols_settings, logit_settings),
                formulas,
            )
        )

    ranked = sorted((r for r in rows if r.error is None), key=lambda r: (r.aic, r.n_params, r.formula))
    failed = [r for r in rows if r.error is not None]

    best = None
    if ranked:
        best = 0
        best_aic = ranked[0].aic
        for row in ranked:
            row.delta_aic = _delta(row.aic, best_aic)
            row.competitive = row.delta_aic < COMPETITIVE_DELTA

    logger.info(
        f"Compared {len(rows)} {family} candidates for '{responses[0]}': "
        f"{len(ranked)} ranked, {len(failed)} failed"
    )
    return ComparisonTable(response=responses[0], family=family, rows=ranked + failed, best=best)
