"""
MarginalEffectsTool: Implementation of marginal_effects MCP tool

Average marginal effects of a logit model on the probability scale, with
delta-method intervals.
"""

from mcp.types import Tool

from ..models.requests import MarginalEffectsRequest, RunConfig
from .base import ALPHA_PROPERTY, DATA_PROPERTIES, FORMULA_PROPERTY, AnalysisTool


class MarginalEffectsTool(AnalysisTool):
    """MCP tool for logit average marginal effects"""

    name = "marginal_effects"
    request_model = MarginalEffectsRequest

    def get_tool_definition(self) -> Tool:
        return Tool(
            name=self.name,
            description="""Reports how much the probability of a 0/1 outcome changes with each regressor, averaged over the observations.

            - Continuous columns: average derivative of the probability
            - Dummy columns: average change when switching from the reference level to that level
            - Only defined for logit models""",
            inputSchema={
                "type": "object",
                "properties": {
                    **DATA_PROPERTIES,
                    "formula": FORMULA_PROPERTY,
                    "alpha": ALPHA_PROPERTY,
                    "terms": {
                        "type": "array",
                        "items": {"type": "string"},
                        "description": "Design columns such as 'x' or 'arch=transformer'; all columns when omitted.",
                    },
                },
                "required": ["data_path", "formula"],
            },
        )

    def build_run(self, request: MarginalEffectsRequest) -> RunConfig:
        return request.to_run_config("ame", terms=request.terms)
