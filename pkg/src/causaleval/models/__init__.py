"""
Models package for CausalEval

This package contains the data models used throughout the application:
frozen dataclasses for the numeric bundles (datasets, formulas, design
matrices, fits) and Pydantic models for tables, reports and requests.
"""
