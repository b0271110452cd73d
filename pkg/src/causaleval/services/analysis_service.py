"""
AnalysisService: orchestration of one analysis run

Loads the dataset named by a RunConfig, applies centering, runs the
requested subcommand for every formula and assembles the Report. The
numeric work is synchronous; run_async moves it off the event loop for the
tool server.

Subcommands:
- fit: coefficient table (+ OLS diagnostics unless disabled)
- anova: per-term SS and partial eta squared (OLS only)
- diagnose: OLS residual checks or logit simulated residuals
- compare: AIC ranking over all formulas
- ame: average marginal effects (logit only)
"""

import asyncio
import logging
from typing import List, Optional

from pydantic import BaseModel

from ..analysis import anova, diagnostics, logit, ols, selection
from ..analysis.dataset import center, read_dataset
from ..analysis.formula import build_design_matrix, parse
from ..analysis.report import build_report
from ..config import Config, config
from ..errors import UsageError
from ..models.dataset import Dataset
from ..models.fits import LogitFit, OlsFit
from ..models.formula import ModelFormula
from ..models.report import Report
from ..models.requests import RunConfig

logger = logging.getLogger(__name__)


class AnalysisService:
    """Runs analyses described by RunConfig objects"""

    def __init__(self, settings: Optional[Config] = None):
        self.settings = settings or config

    def load(self, run: RunConfig) -> tuple[Dataset, str]:
        """
        Read and center the dataset of a run

        Returns:
            The centered dataset and the digest of the file as read
        """
        raw = read_dataset(run.data_path, run.schema_path)
        digest = raw.digest
        dataset = center(raw, run.center) if run.center else raw
        logger.info(f"Dataset {run.data_path} loaded (digest {digest[:12]})")
        return dataset, digest

    def run(self, run: RunConfig) -> Report:
        """Execute a run and return its report; raises CausalEvalError subclasses"""
        self._validate(run)
        formulas = [parse(text) for text in run.formulas]
        dataset, digest = self.load(run)

        handler = getattr(self, f"_run_{run.subcommand}")
        tables = handler(run, formulas, dataset)

        logger.info(f"Run '{run.subcommand}' produced {len(tables)} sections")
        return build_report(
            tables,
            run.family,
            dataset_digest=digest,
            seed=run.seed,
            timestamp=run.timestamp,
        )

    async def run_async(self, run: RunConfig) -> Report:
        """run() in a worker thread"""
        return await asyncio.to_thread(self.run, run)

    def _validate(self, run: RunConfig) -> None:
        if run.subcommand == "ame" and run.family != "logit":
            raise UsageError("'ame' requires --family logit; OLS coefficients already are marginal effects")
        if run.subcommand == "anova" and run.family != "ols":
            raise UsageError("'anova' requires --family ols")

    # Subcommands

    def _fit_ols(self, formula: ModelFormula, dataset: Dataset, run: RunConfig) -> OlsFit:
        dm = build_design_matrix(formula, dataset, run.reference)
        return ols.fit(dm, rank_tol=self.settings.ols.rank_tol)

    def _fit_logit(self, formula: ModelFormula, dataset: Dataset, run: RunConfig) -> LogitFit:
        dm = build_design_matrix(formula, dataset, run.reference)
        s = self.settings.logit
        return logit.fit_logit(
            dm,
            max_iter=s.max_iter,
            grad_tol=s.grad_tol,
            rel_tol=s.rel_tol,
            max_halvings=s.max_halvings,
            separation_bound=s.separation_bound,
            rank_tol=self.settings.ols.rank_tol,
        )

    def _run_fit(self, run: RunConfig, formulas: List[ModelFormula], dataset: Dataset) -> List[BaseModel]:
        tables: List[BaseModel] = []
        for formula in formulas:
            if run.family == "ols":
                fit = self._fit_ols(formula, dataset, run)
                tables.append(ols.coef_table(fit, run.alpha))
                if run.diagnostics:
                    tables.append(diagnostics.ols_suite(fit, self.settings.diagnostics))
            else:
                fit = self._fit_logit(formula, dataset, run)
                tables.append(logit.coef_table_logit(fit, run.alpha))
        return tables

    def _run_anova(self, run: RunConfig, formulas: List[ModelFormula], dataset: Dataset) -> List[BaseModel]:
        return [
            anova.anova_table(
                formula,
                dataset,
                method=run.anova_method,
                workers=run.workers,
                reference_levels=run.reference,
                rank_tol=self.settings.ols.rank_tol,
            )
            for formula in formulas
        ]

    def _run_diagnose(self, run: RunConfig, formulas: List[ModelFormula], dataset: Dataset) -> List[BaseModel]:
        tables: List[BaseModel] = []
        for formula in formulas:
            if run.family == "ols":
                fit = self._fit_ols(formula, dataset, run)
                tables.append(diagnostics.ols_suite(fit, self.settings.diagnostics))
            else:
                fit = self._fit_logit(formula, dataset, run)
                tables.append(
                    diagnostics.logit_suite(
                        fit, run.n_sim, run.seed, run.workers, self.settings.diagnostics
                    )
                )
        return tables

    def _run_compare(self, run: RunConfig, formulas: List[ModelFormula], dataset: Dataset) -> List[BaseModel]:
        candidates = [(formula, run.family) for formula in formulas]
        return [
            selection.compare(
                candidates,
                dataset,
                run.reference,
                run.workers,
                ols_settings=self.settings.ols,
                logit_settings=self.settings.logit,
            )
        ]

    def _run_ame(self, run: RunConfig, formulas: List[ModelFormula], dataset: Dataset) -> List[BaseModel]:
        tables: List[BaseModel] = []
        for formula in formulas:
            fit = self._fit_logit(formula, dataset, run)
            tables.append(logit.marginal_effects_table(fit, run.terms or None, run.alpha))
        return tables
