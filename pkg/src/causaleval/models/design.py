"""
Design matrix models

The design matrix is the numeric encoding of a ModelFormula over a Dataset:
an intercept column of ones followed by one block of columns per term, in
canonical term order. Column metadata records where each column came from so
new rows can be encoded identically and reports can name coefficients.
"""

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Optional

import numpy as np

from ..errors import DataError
from .dataset import ColumnKind, Dataset
from .formula import ModelFormula, Term

INTERCEPT = "(Intercept)"


@dataclass(frozen=True)
class ColumnMeta:
    """Provenance of one design column

    dummies holds the (variable, level) pairs whose indicators enter the
    column; factors holds the names of the encoded parent columns of a
    product column (empty for intercept and main-effect columns).
    """

    name: str
    term: Optional[Term]
    dummies: tuple[tuple[str, str], ...] = ()
    factors: tuple[str, ...] = ()

    @property
    def is_intercept(self) -> bool:
        return self.term is None

    @property
    def is_dummy(self) -> bool:
        """A main-effect indicator column of a categorical variable"""
        return self.term is not None and not self.term.is_interaction and bool(self.dummies)

    @property
    def is_product(self) -> bool:
        return bool(self.factors)


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    """n × (K+1) matrix, intercept first, plus the metadata to rebuild it"""

    matrix: np.ndarray
    column_meta: tuple[ColumnMeta, ...]
    formula: ModelFormula
    term_spans: Mapping[Term, tuple[int, int]]
    levels: Mapping[str, tuple[str, ...]]
    kinds: Mapping[str, ColumnKind]
    response: Optional[np.ndarray] = None
    centering: Mapping[str, float] = field(default_factory=dict)

    # Source rows, kept so counterfactual rows can be re-encoded
    data: Optional[Dataset] = None

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=np.float64)
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        if self.response is not None:
            response = np.array(self.response, dtype=np.float64)
            response.setflags(write=False)
            object.__setattr__(self, "response", response)
        object.__setattr__(self, "term_spans", MappingProxyType(dict(self.term_spans)))
        object.__setattr__(self, "levels", MappingProxyType(dict(self.levels)))
        object.__setattr__(self, "kinds", MappingProxyType(dict(self.kinds)))
        object.__setattr__(self, "centering", MappingProxyType(dict(self.centering)))

    @property
    def n(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def n_columns(self) -> int:
        return int(self.matrix.shape[1])

    @property
    def column_names(self) -> tuple[str, ...]:
        return tuple(meta.name for meta in self.column_meta)

    def index_of(self, name: str) -> int:
        for index, meta in enumerate(self.column_meta):
            if meta.name == name:
                return index
        raise DataError(f"unknown design column '{name}'")

    def require_response(self) -> np.ndarray:
        if self.response is None:
            raise DataError("design matrix has no response vector")
        return self.response
