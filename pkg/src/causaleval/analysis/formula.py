"""
Formula parsing and design-matrix encoding

Grammar (whitespace-insensitive):

    formula := ident "~" expr
    expr    := term ("+" term)*
    term    := factor ((":" | "*") factor)*
    factor  := ident | "(" expr ")"

The grammar deliberately gives ':' its own, tighter level instead of
folding ':' and '*' left to right, matching R: "a*b:c" is
"a + b:c + a:b:c", not "a:c + b:c + a:b:c".
'*' expands into every main effect and every interaction of the operands.
A right-hand side consisting of the single token "1" denotes the
intercept-only model, which is how such models are rendered.
"""

import itertools
import logging
import re
from typing import Mapping, NamedTuple, Optional

import numpy as np

from ..errors import DataError, FormulaError, FormulaSyntaxError, ModelError
from ..models.dataset import ColumnKind, Dataset
from ..models.design import INTERCEPT, ColumnMeta, DesignMatrix
from ..models.formula import ModelFormula, Term
from .dataset import levels as sorted_levels

logger = logging.getLogger(__name__)

_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)|(?P<ident>[A-Za-z_][A-Za-z0-9_.]*)|(?P<one>1(?![0-9A-Za-z_.]))|(?P<op>[~+:*()])"
)

_OP_NAMES = {"~": "'~'", "+": "'+'", ":": "':'", "*": "'*'", "(": "'('", ")": "')'"}


class _Token(NamedTuple):
    kind: str  # ident, one, op, end
    text: str
    offset: int  # byte offset into the UTF-8 encoded formula


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            offset = len(text[:pos].encode("utf-8"))
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", offset)
        kind = match.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, match.group(), len(text[:pos].encode("utf-8"))))
        pos = match.end()
    tokens.append(_Token("end", "", len(text.encode("utf-8"))))
    return tokens


# A term set is an ordered, duplicate-free list of variable sets
_TermSet = list[frozenset[str]]


def _union(*sets: _TermSet) -> _TermSet:
    merged: _TermSet = []
    for term_set in sets:
        for variables in term_set:
            if variables not in merged:
                merged.append(variables)
    return merged


def _interact(left: _TermSet, right: _TermSet) -> _TermSet:
    return _union([a | b for a in left for b in right])


class _Parser:
    """Recursive-descent parser producing sets of variable sets"""

    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.pos]

    def _describe(self, token: _Token) -> str:
        if token.kind == "end":
            return "end of formula"
        return _OP_NAMES.get(token.text, repr(token.text))

    def expect_ident(self) -> str:
        token = self.current
        if token.kind != "ident":
            raise FormulaSyntaxError(
                f"expected a variable name, found {self._describe(token)}", token.offset
            )
        self.pos += 1
        return token.text

    def expect_op(self, op: str) -> None:
        token = self.current
        if token.kind != "op" or token.text != op:
            raise FormulaSyntaxError(
                f"expected {_OP_NAMES[op]}, found {self._describe(token)}", token.offset
            )
        self.pos += 1

    def accept_op(self, op: str) -> bool:
        token = self.current
        if token.kind == "op" and token.text == op:
            self.pos += 1
            return True
        return False

    def expr(self) -> _TermSet:
        result = self.term()
        while self.accept_op("+"):
            result = _union(result, self.term())
        return result

    def term(self) -> _TermSet:
        result = self.product()
        while self.accept_op("*"):
            right = self.product()
            result = _union(result, right, _interact(result, right))
        return result

    def product(self) -> _TermSet:
        result = self.factor()
        while self.accept_op(":"):
            result = _interact(result, self.factor())
        return result

    def factor(self) -> _TermSet:
        if self.accept_op("("):
            inner = self.expr()
            self.expect_op(")")
            return inner
        return [frozenset([self.expect_ident()])]


def parse(text: str) -> ModelFormula:
    """
    Parse an R-style formula into its canonical ModelFormula

    Raises:
        FormulaSyntaxError: text outside the grammar (carries the byte offset)
        FormulaError: empty right-hand side, or the response used as a regressor
    """
    parser = _Parser(text)
    response = parser.expect_ident()
    parser.expect_op("~")

    token = parser.current
    if token.kind == "end":
        raise FormulaSyntaxError("empty right-hand side", token.offset)
    if token.kind == "one":
        parser.pos += 1
        end = parser.current
        if end.kind != "end":
            raise FormulaSyntaxError(
                f"'1' must be the whole right-hand side, found {parser._describe(end)}", end.offset
            )
        return ModelFormula(response)

    term_sets = parser.expr()
    end = parser.current
    if end.kind != "end":
        raise FormulaSyntaxError(f"unexpected {parser._describe(end)}", end.offset)

    formula = ModelFormula(response, tuple(Term(tuple(variables)) for variables in term_sets))
    logger.debug(f"Parsed formula {text!r} as {formula}")
    return formula


def canonical_string(f: ModelFormula) -> str:
    """Deterministic rendering that parses back to f"""
    return str(f)


def as_formula(f) -> ModelFormula:
    if isinstance(f, ModelFormula):
        return f
    if isinstance(f, str):
        return parse(f)
    raise FormulaError(f"expected a formula, got {type(f).__name__}")


class _Block(NamedTuple):
    name: str
    values: np.ndarray
    dummies: tuple[tuple[str, str], ...]


def _encode(
    formula: ModelFormula,
    ds: Dataset,
    kinds: Mapping[str, ColumnKind],
    level_map: Mapping[str, tuple[str, ...]],
) -> tuple[np.ndarray, tuple[ColumnMeta, ...], dict[Term, tuple[int, int]]]:
    blocks: dict[str, list[_Block]] = {}
    for var in formula.variables:
        values = ds[var].values
        if kinds[var] is ColumnKind.CONTINUOUS:
            blocks[var] = [_Block(var, values, ())]
        else:
            blocks[var] = [
                _Block(f"{var}={level}", (values == level).astype(np.float64), ((var, level),))
                for level in level_map[var][1:]
            ]

    columns = [np.ones(ds.n)]
    metas = [ColumnMeta(INTERCEPT, None)]
    spans: dict[Term, tuple[int, int]] = {}
    for term in formula.terms:
        start = len(columns)
        if not term.is_interaction:
            for block in blocks[term.variables[0]]:
                columns.append(block.values)
                metas.append(ColumnMeta(block.name, term, block.dummies))
        else:
            parent_blocks = [blocks[var] for var in term.variables]
            for combo in itertools.product(*parent_blocks):
                columns.append(np.prod(np.vstack([b.values for b in combo]), axis=0))
                metas.append(
                    ColumnMeta(
                        ":".join(b.name for b in combo),
                        term,
                        tuple(pair for b in combo for pair in b.dummies),
                        tuple(b.name for b in combo),
                    )
                )
        spans[term] = (start, len(columns))

    return np.column_stack(columns), tuple(metas), spans


def build_design_matrix(
    f, ds: Dataset, reference_levels: Optional[Mapping[str, str]] = None
) -> DesignMatrix:
    """
    Encode a formula over a dataset

    Continuous main effects are copied, categorical ones dummy-coded against
    the reference level, interactions are products of the encoded parents.
    Column order: intercept, then the terms in canonical order.

    Args:
        f: ModelFormula or formula text
        ds: source dataset
        reference_levels: per-variable reference overrides

    Raises:
        DataError: unknown variable, non-numeric response, single-level factor
        ModelError: fewer observations than columns plus one
    """
    formula = as_formula(f)
    reference_levels = dict(reference_levels or {})

    response = ds[formula.response]
    if not response.is_continuous:
        raise DataError(f"response '{formula.response}' must be numeric")

    kinds: dict[str, ColumnKind] = {}
    level_map: dict[str, tuple[str, ...]] = {}
    for var in formula.variables:
        col = ds[var]
        kinds[var] = col.kind
        if col.is_categorical:
            ordered = sorted_levels(col, reference_levels.get(var))
            if len(ordered) < 2:
                raise DataError(
                    f"categorical variable '{var}' has a single level '{ordered[0]}' and carries no information"
                )
            level_map[var] = tuple(ordered)
        elif var in reference_levels:
            raise DataError(f"reference level given for continuous variable '{var}'")

    matrix, metas, spans = _encode(formula, ds, kinds, level_map)
    if ds.n <= matrix.shape[1]:
        raise ModelError(
            f"{ds.n} observations do not exceed the {matrix.shape[1]} design columns; no residual degrees of freedom"
        )

    used = set(formula.variables) | {formula.response}
    logger.debug(f"Built {ds.n}x{matrix.shape[1]} design matrix for {formula}")
    return DesignMatrix(
        matrix=matrix,
        column_meta=metas,
        formula=formula,
        term_spans=spans,
        levels=level_map,
        kinds=kinds,
        response=response.values,
        centering={k: v for k, v in ds.centering.items() if k in used},
        data=ds,
    )


def encode_rows(template: DesignMatrix, ds: Dataset) -> np.ndarray:
    """
    Encode new rows exactly as template was encoded

    Raises:
        DataError: missing variable, kind mismatch, or a level unseen at fit time
    """
    for var, kind in template.kinds.items():
        col = ds[var]
        if col.kind is not kind:
            raise DataError(
                f"column mismatch: '{var}' is {col.kind.value}, the fitted design expects {kind.value}"
            )
        if kind is ColumnKind.CATEGORICAL:
            known = set(template.levels[var])
            unseen = sorted(set(col.values) - known)
            if unseen:
                raise DataError(f"unseen level '{unseen[0]}' for variable '{var}'")

    matrix, metas, _ = _encode(template.formula, ds, template.kinds, template.levels)
    if tuple(m.name for m in metas) != template.column_names:
        raise DataError("column mismatch between new rows and the fitted design")
    return matrix
