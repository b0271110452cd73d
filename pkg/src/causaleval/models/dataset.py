"""
Dataset models

A Dataset is an immutable, column-oriented table of named continuous or
categorical variables. Column arrays are stored read-only so a Dataset can be
shared across concurrent fits.
"""

import hashlib
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Iterator, Mapping

import numpy as np

from ..errors import DataError


class ColumnKind(str, Enum):
    """Measurement type of a column"""

    CONTINUOUS = "continuous"
    CATEGORICAL = "categorical"


@dataclass(frozen=True, eq=False)
class Column:
    """A named column: float64 values when continuous, str labels when categorical"""

    name: str
    kind: ColumnKind
    values: np.ndarray

    def __post_init__(self):
        if self.kind is ColumnKind.CONTINUOUS:
            values = np.array(self.values, dtype=np.float64)
            if not np.all(np.isfinite(values)):
                raise DataError(f"column '{self.name}' contains non-finite values")
        else:
            values = np.array([str(v) for v in self.values], dtype=object)
            if any(v == "" for v in values):
                raise DataError(f"column '{self.name}' contains empty level labels")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    @property
    def is_continuous(self) -> bool:
        return self.kind is ColumnKind.CONTINUOUS

    @property
    def is_categorical(self) -> bool:
        return self.kind is ColumnKind.CATEGORICAL


@dataclass(frozen=True, eq=False)
class Dataset:
    """Ordered collection of equal-length columns plus the centering record"""

    columns: tuple[Column, ...]
    centering: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        columns = tuple(self.columns)
        if not columns:
            raise DataError("dataset has no columns")

        names = [c.name for c in columns]
        duplicates = sorted({name for name in names if names.count(name) > 1})
        if duplicates:
            raise DataError(f"duplicate column names: {duplicates}")

        lengths = {c.n for c in columns}
        if len(lengths) != 1:
            raise DataError(f"columns have unequal lengths: {sorted(lengths)}")
        if lengths.pop() < 1:
            raise DataError("empty dataset")

        object.__setattr__(self, "columns", columns)
        object.__setattr__(self, "centering", MappingProxyType(dict(self.centering)))

    @property
    def n(self) -> int:
        return self.columns[0].n

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns)

    def __contains__(self, name: object) -> bool:
        return any(c.name == name for c in self.columns)

    def __getitem__(self, name: str) -> Column:
        for column in self.columns:
            if column.name == name:
                return column
        raise DataError(f"unknown variable '{name}'")

    def __iter__(self) -> Iterator[Column]:
        return iter(self.columns)

    @property
    def digest(self) -> str:
        """SHA-256 over names, kinds and values; stable across platforms"""
        h = hashlib.sha256()
        for column in self.columns:
            h.update(column.name.encode("utf-8") + b"\x00")
            h.update(column.kind.value.encode("utf-8") + b"\x00")
            if column.is_continuous:
                h.update(column.values.astype("<f8").tobytes())
            else:
                h.update("\x1f".join(column.values).encode("utf-8"))
            h.update(b"\x1e")
        return h.hexdigest()
