"""
Report models and schemas

This module contains the structured analysis outputs:
- Coefficient, ANOVA, diagnostics, comparison and marginal-effect tables
- The Report envelope (meta + ordered sections) rendered to JSON and text
"""

from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, Field

Family = Literal["ols", "logit"]
Verdict = Literal["pass", "warn", "fail"]
SectionKind = Literal["coefficients", "anova", "diagnostics", "comparison", "marginal_effects"]
StatValue = Union[bool, int, float, str, None]

# Coefficient tables


class CoefficientRow(BaseModel):
    """One coefficient with its test and confidence interval"""

    name: str
    estimate: float
    std_error: float
    statistic: Optional[float] = Field(None, description="t (OLS) or z (logit); None when degenerate")
    p_value: Optional[float] = None
    ci_low: float
    ci_high: float
    degenerate: bool = Field(False, description="Standard error is zero; no test was performed")

    @property
    def significant(self) -> bool:
        """The confidence interval excludes zero"""
        return not self.degenerate and (self.ci_low > 0.0 or self.ci_high < 0.0)


class OddsRatioRow(BaseModel):
    """exp(β) and its interval for a logit coefficient"""

    name: str
    odds_ratio: float
    ci_low: float
    ci_high: float


class CoefficientTable(BaseModel):
    """Coefficient table of a fitted model"""

    formula: str
    family: Family
    alpha: float
    n: int
    df_resid: Optional[int] = None
    null_value: float = 0.0
    rows: List[CoefficientRow]
    odds_ratios: List[OddsRatioRow] = Field(default_factory=list)
    fit_statistics: Dict[str, StatValue] = Field(default_factory=dict)
    centering: Dict[str, float] = Field(
        default_factory=dict, description="Subtracted means; effects are stated at these means"
    )

    @property
    def statistic_label(self) -> str:
        return "t" if self.family == "ols" else "z"


# ANOVA


class AnovaRow(BaseModel):
    """Effect size of one term"""

    term: str
    ss_effect: float
    df_term: int
    ss_error: float
    eta2_partial: float
    f_statistic: Optional[float] = None
    p_value: Optional[float] = None


class AnovaTable(BaseModel):
    """Per-term sums of squares and partial eta squared"""

    formula: str
    method: Literal["model_comparison", "single_term"]
    rows: List[AnovaRow]
    total_ss: float
    residual_ss: float
    df_resid: int


# Diagnostics


class CheckResult(BaseModel):
    """Outcome of one diagnostic check"""

    name: str
    verdict: Verdict
    statistics: Dict[str, StatValue] = Field(default_factory=dict)
    points: List[Tuple[float, float]] = Field(
        default_factory=list, description="Plot-ready [x, y] pairs"
    )
    values: Dict[str, List[float]] = Field(
        default_factory=dict, description="Per-observation series"
    )
    flagged: List[int] = Field(default_factory=list, description="Flagged observation indices")


class DiagnosticsReport(BaseModel):
    """All checks of one diagnostics suite"""

    formula: str
    family: Family
    checks: List[CheckResult]

    def check(self, name: str) -> CheckResult:
        for result in self.checks:
            if result.name == name:
                return result
        raise KeyError(name)


# Model comparison


class ComparisonRow(BaseModel):
    """One candidate model of an AIC comparison"""

    formula: str
    family: Family
    n_params: Optional[int] = None
    loglik: Optional[float] = None
    aic: Optional[float] = None
    delta_aic: Optional[float] = None
    competitive: bool = Field(False, description="Within 2 AIC units of the best model")
    fit_statistic: Optional[float] = Field(
        None, description="Adjusted R² (OLS) or McFadden R² (logit)"
    )
    error: Optional[str] = None


class ComparisonTable(BaseModel):
    """Candidate models ranked by AIC; failed fits follow the ranked rows"""

    response: str
    family: Family
    rows: List[ComparisonRow]
    best: Optional[int] = None


# Marginal effects


class MarginalEffectRow(BaseModel):
    """Average marginal effect with its delta-method interval"""

    name: str
    ame: float
    std_error: float
    ci_low: float
    ci_high: float
    kind: Literal["derivative", "discrete"]

    @property
    def significant(self) -> bool:
        return self.ci_low > 0.0 or self.ci_high < 0.0


class MarginalEffectsTable(BaseModel):
    """Average marginal effects of a logit fit"""

    formula: str
    alpha: float
    rows: List[MarginalEffectRow]


# Report envelope


class ReportMeta(BaseModel):
    """Provenance of a report"""

    tool_version: str
    dataset_digest: Optional[str] = None
    seed: Optional[int] = None
    timestamp: Optional[str] = None
    caveats: List[str] = Field(default_factory=list)


class ReportSection(BaseModel):
    """One rendered analysis output"""

    kind: SectionKind
    payload: Dict[str, Any]


class Report(BaseModel):
    """Report envelope: meta plus sections in insertion order"""

    meta: ReportMeta
    sections: List[ReportSection] = Field(default_factory=list)
