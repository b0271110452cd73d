"""
Shared call flow of the analysis tools

Every tool validates its arguments, turns them into a RunConfig and runs it
through AnalysisService. Results and failures are both returned as JSON text
so agents can branch on the "success" key.
"""

import json
import logging
from typing import Any, Dict, Type

from mcp.types import TextContent, Tool
from pydantic import BaseModel

from ..analysis.report import render_text, to_jsonable
from ..errors import CausalEvalError, UsageError
from ..models.requests import RunConfig
from ..services.analysis_service import AnalysisService

logger = logging.getLogger(__name__)


class AnalysisTool:
    """Base class: subclasses set name and request_model, and build the RunConfig"""

    name: str = ""
    request_model: Type[BaseModel]

    def __init__(self, analysis_service: AnalysisService):
        self.analysis_service = analysis_service

    def get_tool_definition(self) -> Tool:
        raise NotImplementedError

    def build_run(self, request: BaseModel) -> RunConfig:
        raise NotImplementedError

    def _error(self, kind: str, message: str) -> TextContent:
        return TextContent(
            type="text",
            text=json.dumps({"success": False, "error": {"kind": kind, "message": message}}, indent=2),
        )

    async def call_tool(self, arguments: Dict[str, Any]) -> TextContent:
        """
        Execute the tool

        Args:
            arguments: tool arguments as sent by the agent

        Returns:
            TextContent with the report JSON and its text rendering, or an error object
        """
        try:
            request = self.request_model(**arguments)
            run = self.build_run(request)
            report = await self.analysis_service.run_async(run)

            logger.info(f"{self.name} completed with {len(report.sections)} sections")
            return TextContent(
                type="text",
                text=json.dumps(
                    {"success": True, "report": to_jsonable(report), "text": render_text(report)},
                    indent=2,
                    ensure_ascii=False,
                ),
            )

        except UsageError as e:
            logger.error(f"Validation error in {self.name}: {e}")
            return self._error("usage", f"Validation error: {str(e)}")
        except CausalEvalError as e:
            logger.warning(f"Analysis error in {self.name}: {e}")
            return self._error(e.kind, f"Analysis error: {str(e)}")
        except ValueError as e:
            logger.error(f"Validation error in {self.name}: {e}")
            return self._error("usage", f"Validation error: {str(e)}")
        except Exception as e:
            logger.error(f"Unexpected error in {self.name}: {e}")
            return self._error("internal", f"Internal error: {str(e)}")


# Argument schemas shared by the tool definitions

DATA_PROPERTIES: Dict[str, Any] = {
    "data_path": {
        "type": "string",
        "description": "Path to a UTF-8 CSV file with a header row. Missing cells are rejected, not imputed.",
    },
    "schema_path": {
        "type": "string",
        "description": "Optional schema file with 'name=continuous|categorical' lines overriding type inference.",
    },
    "center": {
        "type": "array",
        "items": {"type": "string"},
        "description": "Continuous columns to mean-center first. Recommended for variables entering interactions.",
    },
    "reference": {
        "type": "object",
        "additionalProperties": {"type": "string"},
        "description": "Reference level per categorical variable, e.g. {\"arch\": \"cnn\"}. Default: lexicographically smallest level.",
    },
}

FORMULA_PROPERTY = {
    "type": "string",
    "description": "R-style formula: 'y ~ a + b + a:b'. 'a*b' expands to 'a + b + a:b'; ':' is the interaction only.",
}

FAMILY_PROPERTY = {
    "type": "string",
    "enum": ["ols", "logit"],
    "default": "ols",
    "description": "'ols' for a continuous response, 'logit' for a 0/1 response.",
}

ALPHA_PROPERTY = {
    "type": "number",
    "exclusiveMinimum": 0,
    "exclusiveMaximum": 1,
    "default": 0.05,
    "description": "Significance level of intervals and tests.",
}
