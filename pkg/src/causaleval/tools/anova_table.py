"""
AnovaTableTool: Implementation of anova_table MCP tool

Returns per-term sums of squares and partial eta squared for an OLS formula.
"""

from mcp.types import Tool

from ..models.requests import AnovaTableRequest, RunConfig
from .base import ALPHA_PROPERTY, DATA_PROPERTIES, FORMULA_PROPERTY, AnalysisTool


class AnovaTableTool(AnalysisTool):
    """MCP tool for ANOVA effect sizes"""

    name = "anova_table"
    request_model = AnovaTableRequest

    def get_tool_definition(self) -> Tool:
        return Tool(
            name=self.name,
            description="""Decomposes the variance of a continuous outcome over the terms of a formula and reports partial eta squared per term.

            EFFECT SIZE GUIDANCE:
            - eta2_partial is the share of the remaining variance a term explains once the other terms are accounted for
            - Removing a main effect also removes the interactions containing it
            - method 'single_term' scores each term on its own; it agrees with the default only on balanced designs""",
            inputSchema={
                "type": "object",
                "properties": {
                    **DATA_PROPERTIES,
                    "formula": FORMULA_PROPERTY,
                    "alpha": ALPHA_PROPERTY,
                    "method": {
                        "type": "string",
                        "enum": ["model_comparison", "single_term"],
                        "default": "model_comparison",
                        "description": "Sum-of-squares definition.",
                    },
                },
                "required": ["data_path", "formula"],
            },
        )

    def build_run(self, request: AnovaTableRequest) -> RunConfig:
        return request.to_run_config("anova", anova_method=request.method)
