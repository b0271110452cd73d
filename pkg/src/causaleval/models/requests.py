"""
Request schemas

RunConfig is the validated description of one analysis run, shared by the
CLI and the tool server. The tool request models validate agent-supplied
arguments and convert them into a RunConfig.
"""

from pathlib import Path
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from .report import Family

Subcommand = Literal["fit", "anova", "diagnose", "compare", "ame"]
AnovaMethod = Literal["model_comparison", "single_term"]


class RunConfig(BaseModel):
    """Complete, validated configuration of one analysis run"""

    model_config = ConfigDict(extra="forbid")

    subcommand: Subcommand
    data_path: Path
    schema_path: Optional[Path] = None
    formulas: List[str] = Field(..., min_length=1)
    family: Family = "ols"
    alpha: float = Field(0.05, gt=0.0, lt=1.0)
    center: List[str] = Field(default_factory=list)
    seed: int = Field(42, ge=0)
    n_sim: int = Field(250, ge=50)
    output: Optional[Path] = None
    reference: Dict[str, str] = Field(default_factory=dict)
    workers: int = Field(1, ge=1)
    anova_method: AnovaMethod = "model_comparison"
    terms: List[str] = Field(default_factory=list, description="Design columns for 'ame'; all when empty")
    diagnostics: bool = Field(True, description="Append OLS diagnostics to 'fit'")
    timestamp: Optional[str] = None

    @field_validator("formulas")
    @classmethod
    def _formulas_not_blank(cls, formulas: List[str]) -> List[str]:
        if any(not f.strip() for f in formulas):
            raise ValueError("formula strings must not be blank")
        return formulas


class AnalysisRequest(BaseModel):
    """Common arguments of the analysis tools"""

    data_path: str = Field(..., description="Path to the CSV file with a header row")
    schema_path: Optional[str] = Field(None, description="Optional schema file of 'name=continuous|categorical' lines")
    formula: str = Field(..., description="R-style model formula, e.g. 'acc ~ arch + algo + arch:algo'")
    family: Family = Field("ols", description="'ols' for continuous responses, 'logit' for 0/1 responses")
    alpha: float = Field(0.05, gt=0.0, lt=1.0, description="Significance level of the intervals")
    center: List[str] = Field(default_factory=list, description="Continuous columns to mean-center before fitting")
    reference: Dict[str, str] = Field(default_factory=dict, description="Reference level overrides per categorical variable")

    def to_run_config(self, subcommand: Subcommand, **extra) -> RunConfig:
        return RunConfig(
            subcommand=subcommand,
            data_path=Path(self.data_path),
            schema_path=Path(self.schema_path) if self.schema_path else None,
            formulas=extra.pop("formulas", [self.formula]),
            family=self.family,
            alpha=self.alpha,
            center=self.center,
            reference=self.reference,
            **extra,
        )


class FitModelRequest(AnalysisRequest):
    """Request schema for fit_model tool"""

    diagnostics: bool = Field(True, description="Append OLS diagnostics to the coefficient table")


class AnovaTableRequest(AnalysisRequest):
    """Request schema for anova_table tool"""

    method: AnovaMethod = Field("model_comparison", description="Sum-of-squares definition")


class DiagnoseModelRequest(AnalysisRequest):
    """Request schema for diagnose_model tool"""

    seed: int = Field(42, ge=0, description="Seed of the simulated residuals (logit)")
    n_sim: int = Field(250, ge=50, description="Simulations per observation (logit)")


class CompareModelsRequest(BaseModel):
    """Request schema for compare_models tool"""

    data_path: str = Field(..., description="Path to the CSV file with a header row")
    schema_path: Optional[str] = None
    formulas: List[str] = Field(..., min_length=1, description="Candidate formulas sharing one response")
    family: Family = "ols"
    center: List[str] = Field(default_factory=list)
    reference: Dict[str, str] = Field(default_factory=dict)

    def to_run_config(self) -> RunConfig:
        return RunConfig(
            subcommand="compare",
            data_path=Path(self.data_path),
            schema_path=Path(self.schema_path) if self.schema_path else None,
            formulas=self.formulas,
            family=self.family,
            center=self.center,
            reference=self.reference,
        )


class MarginalEffectsRequest(AnalysisRequest):
    """Request schema for marginal_effects tool"""

    family: Family = Field("logit", description="Marginal effects are defined for logit fits only")
    terms: List[str] = Field(default_factory=list, description="Design columns; all non-intercept columns when empty")
