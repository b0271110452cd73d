"""
Services package for CausalEval

This package contains the orchestration shared by the CLI and the tool server:
- AnalysisService: loads data, runs the requested analysis, assembles the report
- demo_data: synthetic experiment log with known ground-truth effects
"""
