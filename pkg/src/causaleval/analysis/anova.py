"""
ANOVA effect sizes

Per-term sums of squares by model comparison: each term T is scored by the
increase in residual SS when T, and every interaction containing T's
variables, is dropped from the full model. The score is order independent,
so balanced and unbalanced designs are handled alike.

The "single_term" method scores T by the explained SS of the model
containing only T (plus the intercept); on orthogonal designs both agree.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Mapping, Optional

from ..errors import ModelError
from ..models.dataset import Dataset
from ..models.formula import ModelFormula, Term
from ..models.report import AnovaRow, AnovaTable
from . import ols
from .distributions import f_sf
from .formula import as_formula, build_design_matrix

logger = logging.getLogger(__name__)

ANOVA_METHODS = ("model_comparison", "single_term")


def partial_eta2(ss_effect: float, ss_error: float) -> float:
    """SS_effect / (SS_effect + SS_error); 0 when both vanish"""
    denominator = ss_effect + ss_error
    return ss_effect / denominator if denominator > 0 else 0.0


def eta2_from_r2_delta(r2_full: float, r2_reduced: float) -> float:
    """Partial η² from the R² increase: (R²_full − R²_reduced) / (1 − R²_reduced)"""
    if r2_reduced > r2_full + 1e-12:
        raise ModelError(
            f"reduced-model R² {r2_reduced!r} exceeds the full-model R² {r2_full!r}; the models are not nested"
        )
    if r2_reduced >= 1.0:
        return 0.0
    return max(0.0, r2_full - r2_reduced) / (1.0 - r2_reduced)


def marginal_terms(formula: ModelFormula, term: Term) -> tuple[Term, ...]:
    """term plus every higher-order term containing all of its variables"""
    return tuple(t for t in formula.terms if t.contains(term))


def anova_table(
    f,
    ds: Dataset,
    method: str = "model_comparison",
    workers: int = 1,
    reference_levels: Optional[Mapping[str, str]] = None,
    rank_tol: float = 1e-10,
) -> AnovaTable:
    """
    Sums of squares, partial η² and F tests for every term of a formula

    Args:
        f: ModelFormula or formula text with at least one term
        ds: dataset
        method: "model_comparison" (reduced vs full residual SS) or "single_term"
        workers: threads used for the reduced fits
        reference_levels: per-variable reference overrides
        rank_tol: rank tolerance passed to the OLS fits

    Returns:
        AnovaTable with one row per term in canonical order
    """
    if method not in ANOVA_METHODS:
        raise ValueError(f"unknown ANOVA method '{method}'")
    formula = as_formula(f)
    if not formula.terms:
        raise ModelError("ANOVA needs at least one term on the right-hand side")

    full = ols.fit(build_design_matrix(formula, ds, reference_levels), rank_tol)

    def score(term: Term) -> tuple[float, int]:
        if method == "model_comparison":
            reduced_formula = formula.without(marginal_terms(formula, term))
            reduced = ols.fit(build_design_matrix(reduced_formula, ds, reference_levels), rank_tol)
            logger.debug(f"Reduced model for {term}: {reduced_formula} (RSS {reduced.rss!r})")
            return max(reduced.rss - full.rss, 0.0), full.n_coef - reduced.n_coef
        single_formula = ModelFormula(formula.response, (term,))
        single = ols.fit(build_design_matrix(single_formula, ds, reference_levels), rank_tol)
        return max(single.tss - single.rss, 0.0), single.n_coef - 1

    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        scores = list(executor.map(score, formula.terms))

    rows = []
    for term, (ss_effect, df_term) in zip(formula.terms, scores):
        f_statistic = p_value = None
        if df_term > 0:
            if full.s2 > 0:
                f_statistic = (ss_effect / df_term) / full.s2
                p_value = f_sf(f_statistic, df_term, full.df_resid)
            elif ss_effect > 0:
                f_statistic, p_value = math.inf, 0.0
        rows.append(
            AnovaRow(
                term=term.label,
                ss_effect=ss_effect,
                df_term=df_term,
                ss_error=full.rss,
                eta2_partial=partial_eta2(ss_effect, full.rss),
                f_statistic=f_statistic,
                p_value=p_value,
            )
        )

    logger.info(f"ANOVA ({method}) of {formula}: {len(rows)} terms")
    return AnovaTable(
        formula=str(formula),
        method=method,
        rows=rows,
        total_ss=full.tss,
        residual_ss=full.rss,
        df_resid=full.df_resid,
    )
