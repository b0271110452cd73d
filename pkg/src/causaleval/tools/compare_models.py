"""
CompareModelsTool: Implementation of compare_models MCP tool

Ranks candidate formulas for one response by AIC.
"""

from mcp.types import Tool

from ..models.requests import CompareModelsRequest, RunConfig
from .base import DATA_PROPERTIES, FAMILY_PROPERTY, AnalysisTool


class CompareModelsTool(AnalysisTool):
    """MCP tool for AIC model comparison"""

    name = "compare_models"
    request_model = CompareModelsRequest

    def get_tool_definition(self) -> Tool:
        return Tool(
            name=self.name,
            description="""Fits every candidate formula and ranks them by AIC (lower is better).

            SELECTION GUIDANCE:
            - All candidates must share the response and the model family
            - Rows marked competitive are within 2 AIC units of the best and are not meaningfully worse
            - Candidates that cannot be fitted are listed with their error instead of being ranked""",
            inputSchema={
                "type": "object",
                "properties": {
                    **DATA_PROPERTIES,
                    "formulas": {
                        "type": "array",
                        "items": {"type": "string"},
                        "minItems": 1,
                        "description": "Candidate formulas, e.g. ['acc ~ arch', 'acc ~ arch + algo'].",
                    },
                    "family": FAMILY_PROPERTY,
                },
                "required": ["data_path", "formulas"],
            },
        )

    def build_run(self, request: CompareModelsRequest) -> RunConfig:
        return request.to_run_config()
