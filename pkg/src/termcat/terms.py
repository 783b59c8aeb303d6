"""Expressions, terms, and equations with their derived variable/type lists.

An expression is raw typed syntax.  A term pairs an expression with an
explicit ordered set of variables (which may strictly contain the variables
occurring) and a stated result sort.  An equation is two expressions of the
same sort over one shared variable set.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

from .errors import (ArityMismatch, MissingVariables, SortMismatch,
                     TypeDisagrees)
from .signature import Operation, Signature, Sort, Variable, ordered_vars


@dataclass(frozen=True, slots=True)
class Var:
    var: Variable

    @property
    def sort(self) -> Sort:
        return self.var.sort

    def __str__(self) -> str:
        return str(self.var)


@dataclass(frozen=True, slots=True)
class App:
    op: Operation
    args: tuple["Expression", ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if len(self.args) != len(self.op.inputs):
            raise ArityMismatch(
                f"{self.op.name} expects {len(self.op.inputs)} arguments, "
                f"got {len(self.args)}")
        for i, (arg, want) in enumerate(zip(self.args, self.op.inputs), 1):
            if arg.sort != want:
                raise SortMismatch(
                    f"argument {i} of {self.op.name} has sort {arg.sort}, "
                    f"expected {want}", position=i)

    @property
    def sort(self) -> Sort:
        return self.op.output

    def __str__(self) -> str:
        if not self.args:
            return self.op.name
        return f"{self.op.name}({', '.join(str(a) for a in self.args)})"


Expression = Union[Var, App]


def type_of_expression(sig: Signature, e: Expression) -> Sort:
    """Recompute the sort of `e`, revalidating arities against `sig`.

    Constructed values already satisfy the checks; this is the entry point
    for syntax assembled from foreign Operation values.
    """
    if isinstance(e, Var):
        if e.var.sort not in sig.sorts:
            raise SortMismatch(f"variable {e.var} has a foreign sort")
        return e.var.sort
    if e.op not in sig.operations:
        raise ArityMismatch(f"operation {e.op.name} is not in the signature")
    if len(e.args) != len(e.op.inputs):
        raise ArityMismatch(
            f"{e.op.name} expects {len(e.op.inputs)} arguments")
    for i, (arg, want) in enumerate(zip(e.args, e.op.inputs), 1):
        got = type_of_expression(sig, arg)
        if got != want:
            raise SortMismatch(
                f"argument {i} of {e.op.name} has sort {got}, "
                f"expected {want}", position=i)
    return e.op.output


def var_list(e: Expression) -> tuple[Variable, ...]:
    """Variables of `e` in left-to-right order of appearance, repeated."""
    if isinstance(e, Var):
        return (e.var,)
    out: list[Variable] = []
    for a in e.args:
        out.extend(var_list(a))
    return tuple(out)


def var_set(e: Expression) -> tuple[Variable, ...]:
    """Distinct variables of `e` in the canonical order."""
    return ordered_vars(var_list(e))


def type_list(e: Expression) -> tuple[Sort, ...]:
    return tuple(v.sort for v in var_list(e))


def type_set(e: Expression) -> tuple[Sort, ...]:
    return tuple(sorted(set(type_list(e)), key=lambda s: s.index))


@dataclass(frozen=True, slots=True)
class Term:
    expr: Expression
    vars: tuple[Variable, ...]  # canonical order, duplicate free
    sort: Sort

    def __post_init__(self):
        if self.vars != ordered_vars(self.vars):
            raise TypeDisagrees("term variable set is not in canonical order")
        missing = set(var_set(self.expr)) - set(self.vars)
        if missing:
            raise MissingVariables(
                "term omits variables occurring in its expression: "
                + ", ".join(str(v) for v in sorted(missing, key=Variable.key)),
                variables=sorted(missing, key=Variable.key))
        if self.expr.sort != self.sort:
            raise TypeDisagrees(
                f"stated sort {self.sort} disagrees with expression sort "
                f"{self.expr.sort}")

    def __str__(self) -> str:
        vs = ", ".join(str(v) for v in self.vars)
        return f"({self.expr} | {{{vs}}} : {self.sort})"


def make_term(e: Expression, vs: Iterable[Variable], sort: Sort) -> Term:
    return Term(e, ordered_vars(vs), sort)


def input_types(t: Term) -> tuple[Sort, ...]:
    """Sorts of the term's variables in canonical order (with repetitions)."""
    return tuple(v.sort for v in t.vars)


def most_concrete_term(e: Expression) -> Term:
    """The unique term over `e` whose variable set is exactly var_set(e)."""
    return Term(e, var_set(e), e.sort)


@dataclass(frozen=True, slots=True)
class Equation:
    left: Expression
    right: Expression
    vars: tuple[Variable, ...]

    def __post_init__(self):
        if self.left.sort != self.right.sort:
            raise SortMismatch(
                f"equation sides have sorts {self.left.sort} and "
                f"{self.right.sort}")
        if self.vars != ordered_vars(self.vars):
            raise TypeDisagrees(
                "equation variable set is not in canonical order")
        missing = (set(var_set(self.left)) | set(var_set(self.right))) \
            - set(self.vars)
        if missing:
            raise MissingVariables(
                "equation omits variables occurring in its sides: "
                + ", ".join(str(v) for v in sorted(missing, key=Variable.key)),
                variables=sorted(missing, key=Variable.key))

    @property
    def sort(self) -> Sort:
        return self.left.sort

    def __str__(self) -> str:
        vs = ", ".join(str(v) for v in self.vars)
        return f"{self.left} = {self.right}  [{vs}]"


def make_equation(left: Expression, right: Expression,
                  vs: Iterable[Variable]) -> Equation:
    return Equation(left, right, ordered_vars(vs))


def most_concrete_equation(left: Expression, right: Expression) -> Equation:
    return make_equation(left, right, var_set(left) + var_set(right))
