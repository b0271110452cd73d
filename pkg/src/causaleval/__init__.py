"""
CausalEval: econometric regression reports for ML experiment logs

Turns R-style model formulas over tabular experiment logs into OLS and logit
fits with inference, ANOVA effect sizes, AIC model comparison and regression
diagnostics, rendered as canonical JSON and aligned text tables.
"""

__version__ = "0.1.0"
__author__ = "CausalEval Team"
__email__ = "team@causaleval.dev"
