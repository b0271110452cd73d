"""
Dataset ingestion and transformations

Reads RFC-4180 CSV experiment logs into typed, immutable Datasets and
provides the transformations later stages rely on: mean-centering of
continuous columns and deterministic level enumeration of categorical ones.

Missing cells are rejected, never imputed. Without a schema a column is
continuous iff every cell parses as a finite decimal number.
"""

import csv
import io
import logging
from pathlib import Path
from typing import BinaryIO, Iterable, Mapping, Optional, Sequence, Union

import numpy as np
import pandas as pd

from ..errors import DataError
from ..models.dataset import Column, ColumnKind, Dataset

logger = logging.getLogger(__name__)

Schema = Mapping[str, Union[ColumnKind, str]]


def _check_field_counts(text: str) -> None:
    """Every non-blank record has as many fields as the header"""
    reader = csv.reader(io.StringIO(text, newline=""))
    width: Optional[int] = None
    for record in reader:
        if not record:
            continue
        if width is None:
            width = len(record)
        elif len(record) != width:
            raise DataError(
                f"ragged row: line {reader.line_num} has {len(record)} fields, the header has {width}"
            )


def _coerce_kind(name: str, kind: Union[ColumnKind, str]) -> ColumnKind:
    try:
        return ColumnKind(kind)
    except ValueError:
        raise DataError(f"schema: unknown kind '{kind}' for column '{name}'") from None


def _parse_numeric(cells: Sequence[str]) -> Optional[np.ndarray]:
    """Parse every cell as a finite float, or return None"""
    parsed = pd.to_numeric(pd.Series(list(cells), dtype=object), errors="coerce")
    values = parsed.to_numpy(dtype=np.float64, na_value=np.nan)
    if np.all(np.isfinite(values)):
        return values
    return None


def load_schema(text: str) -> dict[str, ColumnKind]:
    """Parse schema lines of the form 'name=continuous|categorical'

    Blank lines and lines starting with '#' are ignored.
    """
    schema: dict[str, ColumnKind] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        name, sep, kind = line.partition("=")
        if not sep or not name.strip():
            raise DataError(f"schema line {lineno}: expected 'name=continuous|categorical'")
        name = name.strip()
        if name in schema:
            raise DataError(f"schema line {lineno}: column '{name}' declared twice")
        schema[name] = _coerce_kind(name, kind.strip())
    return schema


def load_csv(source: Union[bytes, BinaryIO], schema: Optional[Schema] = None) -> Dataset:
    """
    Read a CSV byte stream with a mandatory header row into a Dataset

    Args:
        source: raw CSV bytes or a binary stream (UTF-8, '.' decimal separator)
        schema: optional map of column name to kind overriding type inference

    Returns:
        Dataset with one column per header field, in header order

    Raises:
        DataError: empty file or body, ragged rows, duplicate headers, missing
            cells, a schema naming a missing column, or a non-numeric cell in a
            continuous column
    """
    raw = source if isinstance(source, bytes) else source.read()
    if not raw.strip():
        raise DataError("empty file")

    try:
        _check_field_counts(raw.decode("utf-8"))
    except UnicodeDecodeError as e:
        raise DataError(f"input is not valid UTF-8: {e}") from None
    except csv.Error as e:
        raise DataError(f"malformed CSV: {e}") from None

    try:
        frame = pd.read_csv(
            io.BytesIO(raw),
            header=None,
            dtype=str,
            keep_default_na=False,
            na_filter=False,
            encoding="utf-8",
            skip_blank_lines=True,
        )
    except pd.errors.EmptyDataError:
        raise DataError("empty file") from None
    except pd.errors.ParserError as e:
        raise DataError(f"malformed CSV: {e}") from None
    except UnicodeDecodeError as e:
        raise DataError(f"input is not valid UTF-8: {e}") from None

    cells = frame.to_numpy(dtype=object)
    header = [str(h).strip() for h in cells[0]]
    if any(not h for h in header):
        raise DataError("empty header name")
    duplicates = sorted({h for h in header if header.count(h) > 1})
    if duplicates:
        raise DataError(f"duplicate header names: {duplicates}")

    body = cells[1:]
    if len(body) == 0:
        raise DataError("empty dataset")

    kinds: dict[str, ColumnKind] = {}
    if schema:
        missing = sorted(set(schema) - set(header))
        if missing:
            raise DataError(f"schema names missing columns: {missing}")
        kinds = {name: _coerce_kind(name, kind) for name, kind in schema.items()}

    columns = []
    for j, name in enumerate(header):
        values = [str(v).strip() for v in body[:, j]]
        blank = [i for i, v in enumerate(values) if v == ""]
        if blank:
            raise DataError(
                f"missing cell in column '{name}' at data row {blank[0] + 1}; missing data is not imputed"
            )

        numeric = _parse_numeric(values)
        kind = kinds.get(name)
        if kind is None:
            kind = ColumnKind.CONTINUOUS if numeric is not None else ColumnKind.CATEGORICAL
        if kind is ColumnKind.CONTINUOUS:
            if numeric is None:
                raise DataError(f"continuous column '{name}' contains a non-numeric cell")
            columns.append(Column(name, kind, numeric))
        else:
            columns.append(Column(name, kind, np.array(values, dtype=object)))

    dataset = Dataset(tuple(columns))
    logger.info(f"Loaded dataset with {dataset.n} rows and {len(columns)} columns")
    return dataset


def read_dataset(path: Union[str, Path], schema_path: Optional[Union[str, Path]] = None) -> Dataset:
    """Load a CSV file, with an optional schema file, from disk"""
    schema = None
    if schema_path is not None:
        try:
            schema = load_schema(Path(schema_path).read_text(encoding="utf-8"))
        except OSError as e:
            raise DataError(f"cannot read schema file: {e}") from None
    try:
        raw = Path(path).read_bytes()
    except OSError as e:
        raise DataError(f"cannot read data file: {e}") from None
    return load_csv(raw, schema)


def from_mapping(data: Mapping[str, Sequence], schema: Optional[Schema] = None) -> Dataset:
    """Build a Dataset from in-memory columns; numeric sequences become continuous"""
    columns = []
    for name, values in data.items():
        if schema and name in schema:
            kind = _coerce_kind(name, schema[name])
        else:
            array = np.asarray(values)
            kind = ColumnKind.CONTINUOUS if array.dtype.kind in "biuf" else ColumnKind.CATEGORICAL
        columns.append(Column(name, kind, np.asarray(values)))
    return Dataset(tuple(columns))


def levels(col: Column, reference: Optional[str] = None) -> list[str]:
    """
    Distinct levels of a categorical column, reference level first

    Levels are sorted lexicographically, so the reference defaults to the
    smallest label; an explicit reference is moved to position 0.
    """
    if not col.is_categorical:
        raise DataError(f"column '{col.name}' is not categorical")
    ordered = sorted(set(col.values))
    if reference is not None:
        if reference not in ordered:
            raise DataError(f"reference level '{reference}' not found in column '{col.name}'")
        ordered.remove(reference)
        ordered.insert(0, reference)
    return ordered


def center(ds: Dataset, names: Iterable[str]) -> Dataset:
    """
    Subtract the sample mean from each named continuous column

    The returned Dataset records the cumulative subtracted mean per column,
    so centering twice leaves both values and record unchanged.
    """
    names = set(names)
    centering = dict(ds.centering)
    for name in names:
        col = ds[name]
        if not col.is_continuous:
            raise DataError(f"cannot center categorical column '{name}'")

    columns = []
    for col in ds.columns:
        if col.name in names:
            mean = float(np.mean(col.values))
            columns.append(Column(col.name, col.kind, col.values - mean))
            centering[col.name] = centering.get(col.name, 0.0) + mean
            logger.debug(f"Centered column {col.name} (mean {mean!r})")
        else:
            columns.append(col)
    return Dataset(tuple(columns), centering)


def take(ds: Dataset, indices: Sequence[int]) -> Dataset:
    """Rows of ds in the given order"""
    index = np.asarray(indices, dtype=np.intp)
    columns = tuple(Column(c.name, c.kind, c.values[index]) for c in ds.columns)
    return Dataset(columns, ds.centering)
