"""
FitModelTool: Implementation of fit_model MCP tool

Fits one formula by OLS or logit and returns the coefficient table; OLS fits
also carry the residual diagnostics unless disabled.

Agent Guidance:
- Start every analysis here, then check the diagnostics before interpreting
- A '*' marks coefficients whose interval excludes 0; read it next to the estimate
"""

from mcp.types import Tool

from ..models.requests import FitModelRequest, RunConfig
from .base import ALPHA_PROPERTY, DATA_PROPERTIES, FAMILY_PROPERTY, FORMULA_PROPERTY, AnalysisTool


class FitModelTool(AnalysisTool):
    """MCP tool for fitting a regression model"""

    name = "fit_model"
    request_model = FitModelRequest

    def get_tool_definition(self) -> Tool:
        """Get the MCP tool definition with fitting guidance"""
        return Tool(
            name=self.name,
            description="""Fits a regression model to an experiment log and returns coefficients with standard errors, test statistics, p-values and confidence intervals.

            MODEL GUIDANCE:
            - family 'ols' for continuous outcomes (accuracy, loss); 'logit' for 0/1 outcomes
            - Categorical variables are dummy-coded against a reference level
            - Center continuous variables that enter interactions so main effects are read at the mean
            - OLS results include linearity, normality, VIF, scale-location and influence checks""",
            inputSchema={
                "type": "object",
                "properties": {
                    **DATA_PROPERTIES,
                    "formula": FORMULA_PROPERTY,
                    "family": FAMILY_PROPERTY,
                    "alpha": ALPHA_PROPERTY,
                    "diagnostics": {
                        "type": "boolean",
                        "default": True,
                        "description": "Append OLS diagnostics to the coefficient table.",
                    },
                },
                "required": ["data_path", "formula"],
            },
        )

    def build_run(self, request: FitModelRequest) -> RunConfig:
        return request.to_run_config("fit", diagnostics=request.diagnostics)
