"""
Formula models

A Term is a main effect (one variable) or an interaction (two or more
distinct variables, stored sorted). A ModelFormula keeps its terms in
canonical order: main effects sorted, then interactions by (arity, names).
"""

from dataclasses import dataclass
from typing import Iterable

from ..errors import FormulaError


@dataclass(frozen=True)
class Term:
    """Main effect or interaction over distinct, sorted variables"""

    variables: tuple[str, ...]

    def __post_init__(self):
        variables = tuple(sorted(set(self.variables)))
        if not variables:
            raise FormulaError("a term needs at least one variable")
        object.__setattr__(self, "variables", variables)

    @classmethod
    def of(cls, *variables: str) -> "Term":
        return cls(tuple(variables))

    @property
    def arity(self) -> int:
        return len(self.variables)

    @property
    def is_interaction(self) -> bool:
        return self.arity >= 2

    @property
    def label(self) -> str:
        return ":".join(self.variables)

    @property
    def sort_key(self) -> tuple[int, tuple[str, ...]]:
        return (self.arity, self.variables)

    def contains(self, other: "Term") -> bool:
        """True when every variable of other appears in this term"""
        return set(other.variables) <= set(self.variables)

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True)
class ModelFormula:
    """Response plus canonically ordered, duplicate-free terms; the intercept is implicit"""

    response: str
    terms: tuple[Term, ...] = ()

    def __post_init__(self):
        terms = tuple(sorted(set(self.terms), key=lambda t: t.sort_key))
        for term in terms:
            if self.response in term.variables:
                raise FormulaError(
                    f"response '{self.response}' appears on the right-hand side"
                )
        object.__setattr__(self, "terms", terms)

    @property
    def variables(self) -> tuple[str, ...]:
        """All right-hand-side variables, sorted"""
        return tuple(sorted({v for term in self.terms for v in term.variables}))

    @property
    def main_effects(self) -> tuple[Term, ...]:
        return tuple(t for t in self.terms if not t.is_interaction)

    @property
    def interactions(self) -> tuple[Term, ...]:
        return tuple(t for t in self.terms if t.is_interaction)

    def without(self, removed: Iterable[Term]) -> "ModelFormula":
        removed = set(removed)
        return ModelFormula(self.response, tuple(t for t in self.terms if t not in removed))

    def __str__(self) -> str:
        rhs = " + ".join(t.label for t in self.terms) if self.terms else "1"
        return f"{self.response} ~ {rhs}"
