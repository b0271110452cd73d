"""
Fitted-model bundles

Immutable results of the OLS and logit fits and of the simulated
quantile residuals. Arrays are set read-only on construction.
"""

from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from .design import DesignMatrix


def _freeze_arrays(instance) -> None:
    for f in fields(instance):
        value = getattr(instance, f.name)
        if isinstance(value, np.ndarray):
            value = value.copy()
            value.setflags(write=False)
            object.__setattr__(instance, f.name, value)


@dataclass(frozen=True, eq=False)
class OlsFit:
    """Least-squares fit with its inferential bundle

    df_resid is n − K where K counts every estimated coefficient including
    the intercept; cov_beta = s2 · xtx_inv.
    """

    design: DesignMatrix
    beta_hat: np.ndarray
    cov_beta: np.ndarray
    xtx_inv: np.ndarray
    residuals: np.ndarray
    fitted: np.ndarray
    hat_diag: np.ndarray
    s2: float
    df_resid: int
    rss: float
    tss: float
    r2: float
    r2_adj: float
    loglik: float
    f_statistic: Optional[float] = None
    f_pvalue: Optional[float] = None

    def __post_init__(self):
        _freeze_arrays(self)

    @property
    def n(self) -> int:
        return self.design.n

    @property
    def n_coef(self) -> int:
        return self.design.n_columns

    @property
    def column_names(self) -> tuple[str, ...]:
        return self.design.column_names

    @property
    def s(self) -> float:
        return float(np.sqrt(self.s2))


@dataclass(frozen=True, eq=False)
class LogitFit:
    """Maximum-likelihood logit fit

    info_inv is the inverse observed information of the summed
    log-likelihood, i.e. the coefficient covariance.
    """

    design: DesignMatrix
    beta_hat: np.ndarray
    info_inv: np.ndarray
    fitted_prob: np.ndarray
    loglik_full: float
    loglik_null: float
    converged: bool
    iterations: int
    grad_norm: float

    def __post_init__(self):
        _freeze_arrays(self)

    @property
    def n(self) -> int:
        return self.design.n

    @property
    def n_coef(self) -> int:
        return self.design.n_columns

    @property
    def column_names(self) -> tuple[str, ...]:
        return self.design.column_names


@dataclass(frozen=True, eq=False)
class SimulatedResiduals:
    """Randomized quantile residuals of a logit fit and their uniformity test"""

    quantiles: np.ndarray
    n_sim: int
    seed: int
    ks_statistic: float
    ks_pvalue: float

    def __post_init__(self):
        _freeze_arrays(self)
