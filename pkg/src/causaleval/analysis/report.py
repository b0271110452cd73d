"""
Report rendering

render_json produces canonical JSON: keys sorted, no insignificant
whitespace, UTF-8, newline-terminated. Floats use the shortest repr that
round-trips exactly; ±inf become the strings "inf"/"-inf" and NaN becomes
null, so the output is strict JSON.

render_text produces fixed-width tables: text columns left-aligned, numeric
columns right-aligned and rounded to 4 decimals, "*" marking coefficients
whose interval excludes 0.
"""

import json
import math
from typing import Any, Iterable, Optional, Sequence

import numpy as np
from pydantic import BaseModel

from .. import __version__
from ..models.report import (
    AnovaTable,
    CoefficientTable,
    ComparisonTable,
    DiagnosticsReport,
    Family,
    MarginalEffectsTable,
    Report,
    ReportMeta,
    ReportSection,
    SectionKind,
)

CAVEAT_HOMOSCEDASTIC = "OLS standard errors assume homoscedastic errors; robust covariance is not computed"
CAVEAT_GAUSSIAN_AIC = "OLS AIC uses the Gaussian log-likelihood with sigma^2 = RSS/n and counts sigma^2 as a parameter"
CAVEAT_ASYMPTOTIC_KS = "KS p-values use the asymptotic Kolmogorov distribution"
CAVEAT_LOGIT_WALD = "logit intervals are Wald intervals from the inverse observed information"

_SECTION_KINDS: dict[type, SectionKind] = {
    CoefficientTable: "coefficients",
    AnovaTable: "anova",
    DiagnosticsReport: "diagnostics",
    ComparisonTable: "comparison",
    MarginalEffectsTable: "marginal_effects",
}


def section(table: BaseModel) -> ReportSection:
    """Wrap an analysis table as a report section"""
    try:
        kind = _SECTION_KINDS[type(table)]
    except KeyError:
        raise TypeError(f"no report section for {type(table).__name__}") from None
    return ReportSection(kind=kind, payload=table.model_dump(mode="python"))


def caveats_for(kinds: Iterable[SectionKind], family: Family) -> list[str]:
    """Caveat lines matching the sections of a report"""
    kinds = set(kinds)
    caveats = []
    if family == "ols" and kinds & {"coefficients", "anova"}:
        caveats.append(CAVEAT_HOMOSCEDASTIC)
    if family == "logit" and kinds & {"coefficients", "marginal_effects"}:
        caveats.append(CAVEAT_LOGIT_WALD)
    if family == "ols" and "comparison" in kinds:
        caveats.append(CAVEAT_GAUSSIAN_AIC)
    if "diagnostics" in kinds:
        caveats.append(CAVEAT_ASYMPTOTIC_KS)
    return caveats


def build_report(
    tables: Sequence[BaseModel],
    family: Family,
    dataset_digest: Optional[str] = None,
    seed: Optional[int] = None,
    timestamp: Optional[str] = None,
) -> Report:
    sections = [section(t) for t in tables]
    meta = ReportMeta(
        tool_version=__version__,
        dataset_digest=dataset_digest,
        seed=seed,
        timestamp=timestamp,
        caveats=caveats_for((s.kind for s in sections), family),
    )
    return Report(meta=meta, sections=sections)


# JSON


def _sanitize(value: Any) -> Any:
    if isinstance(value, BaseModel):
        return _sanitize(value.model_dump(mode="python"))
    if isinstance(value, dict):
        return {str(k): _sanitize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_sanitize(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return None
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return value


def to_jsonable(report: Report) -> dict:
    """Plain JSON-compatible structure of a report"""
    return _sanitize(report)


def render_json(report: Report) -> bytes:
    """Canonical JSON bytes; identical reports give identical bytes"""
    text = json.dumps(
        to_jsonable(report),
        sort_keys=True,
        separators=(",", ":"),
        ensure_ascii=False,
        allow_nan=False,
    )
    return (text + "\n").encode("utf-8")


def canonicalize(data: bytes) -> bytes:
    """Parse and re-render JSON bytes in canonical form"""
    parsed = json.loads(data.decode("utf-8"))
    text = json.dumps(parsed, sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False)
    return (text + "\n").encode("utf-8")


# Text


def _num(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        text = f"{value:.4f}"
        return "0.0000" if text == "-0.0000" else text
    return str(value)


def _table(headers: Sequence[str], rows: Sequence[Sequence[str]], align: str) -> list[str]:
    widths = [max([len(h)] + [len(r[i]) for r in rows]) for i, h in enumerate(headers)]

    def line(cells: Sequence[str]) -> str:
        parts = [c.ljust(w) if a == "l" else c.rjust(w) for c, w, a in zip(cells, widths, align)]
        return "  ".join(parts).rstrip()

    return [line(headers)] + [line(r) for r in rows]


def _coefficients_text(table: CoefficientTable) -> list[str]:
    lines = [f"== Coefficients: {table.formula} ({table.family}, alpha={_num(table.alpha)}) =="]
    label = table.statistic_label
    rows = []
    for row in table.rows:
        if row.degenerate:
            marker = "!"
        else:
            marker = "*" if row.significant else ""
        rows.append(
            [
                row.name,
                _num(row.estimate),
                _num(row.std_error),
                _num(row.statistic) if not row.degenerate else "n/a",
                _num(row.p_value) if not row.degenerate else "n/a",
                _num(row.ci_low),
                _num(row.ci_high),
                marker,
            ]
        )
    lines += _table(["term", "estimate", "std_error", label, "p_value", "ci_low", "ci_high", ""], rows, "lrrrrrrl")

    if table.odds_ratios:
        lines.append("")
        odds = [[r.name, _num(r.odds_ratio), _num(r.ci_low), _num(r.ci_high)] for r in table.odds_ratios]
        lines += _table(["term", "odds_ratio", "ci_low", "ci_high"], odds, "lrrr")

    lines.append("")
    lines.append(f"n = {table.n}" + (f", df_resid = {table.df_resid}" if table.df_resid is not None else ""))
    for key, value in table.fit_statistics.items():
        lines.append(f"{key}: {_num(value)}")
    for name, mean in sorted(table.centering.items()):
        lines.append(f"centered: {name} (effects at mean {_num(mean)})")
    if any(r.degenerate for r in table.rows):
        lines.append("! zero standard error: no test performed")
    return lines


def _anova_text(table: AnovaTable) -> list[str]:
    lines = [f"== ANOVA: {table.formula} ({table.method}) =="]
    rows = [
        [
            row.term,
            _num(row.ss_effect),
            _num(row.df_term),
            _num(row.ss_error),
            _num(row.eta2_partial),
            _num(row.f_statistic),
            _num(row.p_value),
        ]
        for row in table.rows
    ]
    lines += _table(["term", "ss_effect", "df", "ss_error", "eta2_partial", "F", "p_value"], rows, "lrrrrrr")
    lines.append("")
    lines.append(f"total_ss: {_num(table.total_ss)}")
    lines.append(f"residual_ss: {_num(table.residual_ss)}")
    lines.append(f"df_resid: {table.df_resid}")
    return lines


def _diagnostics_text(report: DiagnosticsReport) -> list[str]:
    lines = [f"== Diagnostics: {report.formula} ({report.family}) =="]
    rows = []
    for check in report.checks:
        details = ", ".join(f"{k}={_num(v)}" for k, v in check.statistics.items())
        if check.flagged:
            details += f"{', ' if details else ''}flagged={len(check.flagged)}"
        rows.append([check.name, check.verdict, details])
    lines += _table(["check", "verdict", "details"], rows, "lll")
    return lines


def _comparison_text(table: ComparisonTable) -> list[str]:
    lines = [f"== Model comparison (AIC): {table.response} ({table.family}) =="]
    statistic = "r2_adj" if table.family == "ols" else "mcfadden_r2"
    ranked = [r for r in table.rows if r.error is None]
    rows = [
        [
            str(rank),
            row.formula,
            _num(row.n_params),
            _num(row.loglik),
            _num(row.aic),
            _num(row.delta_aic),
            _num(row.fit_statistic),
            "*" if row.competitive else "",
        ]
        for rank, row in enumerate(ranked, start=1)
    ]
    lines += _table(["rank", "formula", "K", "loglik", "aic", "delta_aic", statistic, ""], rows, "rlrrrrrl")
    for row in table.rows:
        if row.error is not None:
            lines.append(f"failed: {row.formula}: {row.error}")
    return lines


def _marginal_effects_text(table: MarginalEffectsTable) -> list[str]:
    lines = [f"== Average marginal effects: {table.formula} (alpha={_num(table.alpha)}) =="]
    rows = [
        [
            row.name,
            _num(row.ame),
            _num(row.std_error),
            _num(row.ci_low),
            _num(row.ci_high),
            row.kind,
            "*" if row.significant else "",
        ]
        for row in table.rows
    ]
    lines += _table(["term", "ame", "std_error", "ci_low", "ci_high", "kind", ""], rows, "lrrrrll")
    return lines


_TEXT_RENDERERS = {
    "coefficients": (CoefficientTable, _coefficients_text),
    "anova": (AnovaTable, _anova_text),
    "diagnostics": (DiagnosticsReport, _diagnostics_text),
    "comparison": (ComparisonTable, _comparison_text),
    "marginal_effects": (MarginalEffectsTable, _marginal_effects_text),
}


def render_text(report: Report) -> str:
    """Plain-text regression tables, one block per section"""
    meta = report.meta
    lines = [f"causaleval {meta.tool_version}"]
    if meta.dataset_digest:
        lines.append(f"dataset: {meta.dataset_digest}")
    if meta.seed is not None:
        lines.append(f"seed: {meta.seed}")
    if meta.timestamp:
        lines.append(f"timestamp: {meta.timestamp}")
    for caveat in meta.caveats:
        lines.append(f"note: {caveat}")

    for sec in report.sections:
        model, renderer = _TEXT_RENDERERS[sec.kind]
        lines.append("")
        lines += renderer(model.model_validate(sec.payload))
    return "\n".join(lines) + "\n"
