"""
Configuration management for CausalEval

This module handles all configuration settings and environment variables,
grouped into sections that mirror the analysis pipeline:

Analysis: significance level, RNG seed, simulation count, worker pool
OLS / Logit: numerical tolerances of the fitting routines
Diagnostics: verdict thresholds of the regression checks
"""

from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class AnalysisSettings(BaseSettings):
    """Run-level analysis settings"""

    model_config = SettingsConfigDict(env_prefix="CAUSALEVAL_", extra="ignore")

    alpha: float = Field(default=0.05, gt=0.0, lt=1.0)
    seed: int = Field(default=42, ge=0)
    n_sim: int = Field(default=250, ge=50)
    workers: int = Field(default=1, ge=1)
    debug: bool = False

    # Left unset so identical inputs render byte-identical reports
    timestamp: Optional[str] = None


class OlsSettings(BaseSettings):
    """Least-squares fitting settings"""

    model_config = SettingsConfigDict(env_prefix="CAUSALEVAL_OLS_", extra="ignore")

    rank_tol: float = Field(default=1e-10, gt=0.0)


class LogitSettings(BaseSettings):
    """Newton-Raphson settings for the logit fit"""

    model_config = SettingsConfigDict(env_prefix="CAUSALEVAL_LOGIT_", extra="ignore")

    max_iter: int = Field(default=100, ge=1)
    grad_tol: float = Field(default=1e-8, gt=0.0)
    rel_tol: float = Field(default=1e-12, gt=0.0)
    max_halvings: int = Field(default=30, ge=0)
    separation_bound: float = Field(default=30.0, gt=0.0)


class DiagnosticsSettings(BaseSettings):
    """Verdict thresholds for the regression diagnostics"""

    model_config = SettingsConfigDict(env_prefix="CAUSALEVAL_DIAG_", extra="ignore")

    bin_sigma: float = Field(default=3.0, gt=0.0)
    vif_warn: float = Field(default=5.0, gt=1.0)
    vif_fail: float = Field(default=10.0, gt=1.0)
    leverage_factor: float = Field(default=2.0, gt=0.0)
    cook_factor: float = Field(default=4.0, gt=0.0)
    ks_alpha: float = Field(default=0.01, gt=0.0, lt=1.0)
    rank_corr_z: float = Field(default=2.58, gt=0.0)
    closed_form_min_sim: int = Field(default=1000, ge=50)


class Config:
    """Main configuration class that combines all configuration sections"""

    def __init__(self):
        # Load environment variables from .env file
        from dotenv import load_dotenv

        load_dotenv()

        self.analysis = AnalysisSettings()
        self.ols = OlsSettings()
        self.logit = LogitSettings()
        self.diagnostics = DiagnosticsSettings()

    @property
    def debug(self) -> bool:
        """Check if debug logging is requested"""
        return self.analysis.debug


# Global configuration instance
config = Config()
