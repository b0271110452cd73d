"""
MCP Tools package for CausalEval

One class per agent-facing analysis tool. Each validates its arguments with
a request model, delegates to AnalysisService and returns the report as JSON.
"""
