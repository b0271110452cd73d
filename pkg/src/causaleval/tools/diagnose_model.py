"""
DiagnoseModelTool: Implementation of diagnose_model MCP tool

Runs the diagnostics suite of the model family: residual checks for OLS,
simulated quantile residuals for logit.
"""

from mcp.types import Tool

from ..models.requests import DiagnoseModelRequest, RunConfig
from .base import DATA_PROPERTIES, FAMILY_PROPERTY, FORMULA_PROPERTY, AnalysisTool


class DiagnoseModelTool(AnalysisTool):
    """MCP tool for regression diagnostics"""

    name = "diagnose_model"
    request_model = DiagnoseModelRequest

    def get_tool_definition(self) -> Tool:
        return Tool(
            name=self.name,
            description="""Checks the assumptions behind a fitted model and returns a verdict (pass/warn/fail) per check with plot-ready point series.

            OLS: residual_vs_fitted (linearity), normality (Q-Q + KS), vif (multicollinearity), scale_location (homoscedasticity), influence (leverage, Cook's distance).
            LOGIT: simulated_residuals (quantile residuals should be uniform) and vif.

            Results are reproducible for a given seed.""",
            inputSchema={
                "type": "object",
                "properties": {
                    **DATA_PROPERTIES,
                    "formula": FORMULA_PROPERTY,
                    "family": FAMILY_PROPERTY,
                    "seed": {"type": "integer", "minimum": 0, "default": 42},
                    "n_sim": {
                        "type": "integer",
                        "minimum": 50,
                        "default": 250,
                        "description": "Simulations per observation for the logit residuals.",
                    },
                },
                "required": ["data_path", "formula"],
            },
        )

    def build_run(self, request: DiagnoseModelRequest) -> RunConfig:
        return request.to_run_config("diagnose", seed=request.seed, n_sim=request.n_sim)
