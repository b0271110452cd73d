"""
Analysis package for CausalEval

Numeric core of the toolbox, one module per concern:
- dataset: CSV ingestion, typing, centering, level enumeration
- formula: R-style formula parsing and design-matrix encoding
- distributions: Normal, Student t, F and Kolmogorov laws
- ols, logit: model fits and coefficient inference
- anova: sums of squares and partial eta squared
- diagnostics: residual checks, VIF, influence, simulated residuals
- selection: AIC model comparison
- report: canonical JSON and text rendering
"""
