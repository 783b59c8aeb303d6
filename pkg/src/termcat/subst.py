"""Substitution of terms for variables, by recursion and by composition.

The recursive route rewrites the expression and the variable set.  The
direct route builds one arrow per substitution instance: projections at
every coordinate except the substituted one, which carries the replacement
term's arrow.  The two routes compile to formally equal arrows; the test
suite exercises that equivalence at scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .arrows import (FPArrow, Comp, Proj, TupleArrow, flat_product,
                     term_arrow)
from .errors import MissingVariables, SortMismatch, UninhabitedFill
from .signature import Sort, Variable, ordered_vars
from .terms import App, Expression, Term, Var


@dataclass(frozen=True, slots=True)
class SubstInstance:
    target: Term
    var: Variable
    replacement: Term

    def __post_init__(self):
        if self.var not in self.target.vars:
            raise MissingVariables(
                f"{self.var} is not among the target term's variables",
                variables=(self.var,))
        if self.replacement.sort != self.var.sort:
            raise SortMismatch(
                f"cannot substitute a term of sort {self.replacement.sort} "
                f"for {self.var}")

    def result_vars(self) -> tuple[Variable, ...]:
        kept = tuple(v for v in self.target.vars if v != self.var)
        return ordered_vars(kept + self.replacement.vars)

    def union_vars(self) -> tuple[Variable, ...]:
        return ordered_vars(self.target.vars + self.replacement.vars)


def subst_expr(e: Expression, x: Variable, u: Expression) -> Expression:
    """Replace every occurrence of `x` in `e` by `u`."""
    if u.sort != x.sort:
        raise SortMismatch(
            f"cannot substitute an expression of sort {u.sort} for {x}")
    if isinstance(e, Var):
        return u if e.var == x else e
    return App(e.op, tuple(subst_expr(a, x, u) for a in e.args))


def subst_term(inst: SubstInstance) -> Term:
    """The recursive route: rewrite the expression, rewrite the variable set."""
    e = subst_expr(inst.target.expr, inst.var, inst.replacement.expr)
    return Term(e, inst.result_vars(), inst.target.sort)


def substitution_arrow(inst: SubstInstance) -> TupleArrow:
    """The arrow from the result-variable product to the union product.

    Every coordinate is the projection fetching the same variable from the
    result product, except the substituted variable's coordinate, which is
    the replacement term's arrow over the result variables.  When the
    substituted variable also occurs among the replacement's variables the
    two products coincide; otherwise they differ in exactly that factor.
    Either way, indexing goes through the canonical variable order.
    """
    union = inst.union_vars()
    result = inst.result_vars()
    src = flat_product(v.sort for v in result)
    position = {v: k for k, v in enumerate(result, 1)}
    parts: list[FPArrow] = []
    for v in union:
        if v == inst.var:
            parts.append(term_arrow(Term(inst.replacement.expr, result,
                                         inst.replacement.sort)))
        else:
            parts.append(Proj(src, position[v]))
    return TupleArrow(src, tuple(parts))


def subst_arrow_direct(inst: SubstInstance) -> FPArrow:
    """The composition route: the target's arrow over the union variables,
    precomposed with the substitution arrow."""
    over_union = term_arrow(Term(inst.target.expr, inst.union_vars(),
                                 inst.target.sort))
    return Comp(over_union, substitution_arrow(inst))


def retyping_arrow(source_vars, target_vars,
                   witnesses: Mapping[Sort, Expression]) -> TupleArrow:
    """Product-of-source-variables to product-of-target-variables.

    Shared variables map by projection.  A target variable missing from the
    source is filled by the canonical closed witness of its sort; if the
    sort is empty no filler exists and the map is undefined.
    """
    source = ordered_vars(source_vars)
    target = ordered_vars(target_vars)
    src = flat_product(v.sort for v in source)
    position = {v: k for k, v in enumerate(source, 1)}
    parts: list[FPArrow] = []
    for v in target:
        if v in position:
            parts.append(Proj(src, position[v]))
        else:
            w = witnesses.get(v.sort)
            if w is None:
                raise UninhabitedFill(v.sort)
            parts.append(term_arrow(Term(w, source, v.sort)))
    return TupleArrow(src, tuple(parts))
