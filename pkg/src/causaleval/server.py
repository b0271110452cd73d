"""
CausalEval MCP Server

Exposes the analysis subcommands as MCP tools so an agent can fit models to
an experiment log and read the report back as JSON.

Implements MCP-native guidance through:
- Tool descriptions with interpretation guidance
- An analysis_workflow prompt describing the recommended order of calls
"""

import asyncio
import logging
from typing import Any, Sequence

import mcp.server.stdio
import mcp.types as types
from mcp.server.lowlevel import NotificationOptions, Server
from mcp.server.models import InitializationOptions

from . import __version__
from .config import config
from .services.analysis_service import AnalysisService
from .tools.anova_table import AnovaTableTool
from .tools.base import AnalysisTool
from .tools.compare_models import CompareModelsTool
from .tools.diagnose_model import DiagnoseModelTool
from .tools.fit_model import FitModelTool
from .tools.marginal_effects import MarginalEffectsTool

logger = logging.getLogger(__name__)

SERVER_NAME = "causaleval-mcp-server"

ANALYSIS_WORKFLOW = """Analyze an experiment log in this order:

1. FIT (fit_model):
- Put every factor you varied on the right-hand side
- Center continuous variables that enter interactions
- Use family 'logit' only for 0/1 outcomes

2. CHECK (diagnose_model):
- A 'fail' verdict means the intervals of step 1 should not be trusted as they are
- Heavy-tailed residuals or strong heteroscedasticity call for a different model, not for dropping points

3. SIZE THE EFFECTS:
- anova_table for the share of variance each term explains (OLS)
- marginal_effects for probability-scale effects (logit)

4. COMPARE (compare_models):
- Rank alternative formulas by AIC; rows within 2 units of the best are equally supported

Every report is observational: coefficients describe associations in the logged runs."""


class CausalEvalMCPServer:
    """MCP server exposing the five analysis tools"""

    def __init__(self, analysis_service: AnalysisService | None = None):
        self.server = Server(SERVER_NAME)
        self.analysis_service = analysis_service or AnalysisService()

        self.tools: dict[str, AnalysisTool] = {
            tool.name: tool
            for tool in (
                FitModelTool(self.analysis_service),
                AnovaTableTool(self.analysis_service),
                DiagnoseModelTool(self.analysis_service),
                CompareModelsTool(self.analysis_service),
                MarginalEffectsTool(self.analysis_service),
            )
        }

        self._register_handlers()

    def _register_handlers(self):
        """Register MCP server handlers"""

        @self.server.list_tools()
        async def handle_list_tools() -> list[types.Tool]:
            return [tool.get_tool_definition() for tool in self.tools.values()]

        @self.server.list_prompts()
        async def handle_list_prompts() -> list[types.Prompt]:
            return [
                types.Prompt(
                    name="analysis_workflow",
                    description="Recommended order of fitting, checking and comparing models",
                    arguments=[],
                )
            ]

        @self.server.get_prompt()
        async def handle_get_prompt(name: str, arguments: dict[str, str] | None) -> types.GetPromptResult:
            return self.get_prompt(name)

        @self.server.call_tool()
        async def handle_call_tool(name: str, arguments: dict[str, Any]) -> Sequence[types.TextContent]:
            return await self.dispatch(name, arguments)

    def get_prompt(self, name: str) -> types.GetPromptResult:
        """Get prompt content for agent guidance"""
        if name != "analysis_workflow":
            raise ValueError(f"Unknown prompt: {name}")
        return types.GetPromptResult(
            description="Recommended order of fitting, checking and comparing models",
            messages=[
                types.PromptMessage(
                    role="user",
                    content=types.TextContent(type="text", text=ANALYSIS_WORKFLOW),
                )
            ],
        )

    async def dispatch(self, name: str, arguments: dict[str, Any] | None) -> list[types.TextContent]:
        """Route a tool call; unknown names come back as text with the available tools"""
        logger.info(f"Calling tool: {name}")
        tool = self.tools.get(name)
        if tool is None:
            available = ", ".join(self.tools)
            return [types.TextContent(type="text", text=f"Unknown tool: {name}. Available tools: {available}")]
        return [await tool.call_tool(arguments or {})]

    async def run(self):
        """Run the MCP server over stdio"""
        try:
            async with mcp.server.stdio.stdio_server() as (read_stream, write_stream):
                await self.server.run(
                    read_stream,
                    write_stream,
                    InitializationOptions(
                        server_name=SERVER_NAME,
                        server_version=__version__,
                        capabilities=self.server.get_capabilities(
                            notification_options=NotificationOptions(),
                            experimental_capabilities={},
                        ),
                    ),
                )
        except Exception as e:
            logger.error(f"Server error: {e}")
            raise


async def main():
    """Main entry point for the MCP server"""
    log_level = "DEBUG" if config.debug else "INFO"

    logging.basicConfig(
        level=getattr(logging, log_level),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )

    logger.info("CausalEval MCP server starting...")

    server = CausalEvalMCPServer()
    await server.run()


def run():
    asyncio.run(main())


if __name__ == "__main__":
    run()
