"""The free finite-product category over a signature's sketch.

Objects are finite trees of sorts; `Prod(())` is the terminal object.
Arrows are syntax: identities, projections, tuples, composites, and one
generator per operation.  Equality is decided by reduction to a canonical
normal form: into a product, a tuple of normal forms per factor; into a
sort, a first-order term whose leaves are projection paths into the domain
tree.  The normal form is unique per equivalence class under the product
laws, so structural comparison of normal forms decides formal equality.

The term compiler produces an arrow for every term as a three-stage
composite:

  occurrence_arrow  sends the product of the term's declared variables onto
                    the list of variable occurrences (a tuple of projections);
  regroup_arrow     reassociates that flat product into the nested shape of
                    the expression's argument tree (a tuple of paths);
  apply_arrow       applies the operations (generators over products).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .errors import EndpointMismatch
from .signature import Operation, Sort
from .terms import Equation, Expression, Term, Var, var_list

# --- objects -----------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Leaf:
    sort: Sort

    def __str__(self) -> str:
        return self.sort.name


@dataclass(frozen=True, slots=True)
class Prod:
    factors: tuple["FPObject", ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))

    def __str__(self) -> str:
        if not self.factors:
            return "1"
        return "(" + " x ".join(str(f) for f in self.factors) + ")"


FPObject = Union[Leaf, Prod]

TERMINAL = Prod(())


def flat_product(sorts: Iterable[Sort]) -> Prod:
    return Prod(tuple(Leaf(s) for s in sorts))


# --- arrows --------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Id:
    obj: FPObject

    def __str__(self) -> str:
        return f"id[{self.obj}]"


@dataclass(frozen=True, slots=True)
class Proj:
    src: Prod
    index: int  # 1-based

    def __post_init__(self):
        if not isinstance(self.src, Prod):
            raise EndpointMismatch("projection source must be a product")
        if not 1 <= self.index <= len(self.src.factors):
            raise EndpointMismatch(
                f"projection index {self.index} out of range for {self.src}")

    def __str__(self) -> str:
        return f"p{self.index}"


@dataclass(frozen=True, slots=True)
class Gen:
    op: Operation

    def __str__(self) -> str:
        return self.op.name


@dataclass(frozen=True, slots=True)
class TupleArrow:
    src: FPObject
    parts: tuple["FPArrow", ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        for p in self.parts:
            if dom(p) != self.src:
                raise EndpointMismatch(
                    f"tuple component {p} has domain {dom(p)}, "
                    f"expected {self.src}")

    def __str__(self) -> str:
        return "<" + ", ".join(str(p) for p in self.parts) + ">"


@dataclass(frozen=True, slots=True)
class Comp:
    after: "FPArrow"
    before: "FPArrow"

    def __post_init__(self):
        if cod(self.before) != dom(self.after):
            raise EndpointMismatch(
                f"cannot compose: {self.after} expects {dom(self.after)}, "
                f"{self.before} yields {cod(self.before)}")

    def __str__(self) -> str:
        return f"{self.after} . {self.before}"


FPArrow = Union[Id, Proj, Gen, TupleArrow, Comp]


def dom(a: FPArrow) -> FPObject:
    if isinstance(a, Id):
        return a.obj
    if isinstance(a, Proj):
        return a.src
    if isinstance(a, Gen):
        return flat_product(a.op.inputs)
    if isinstance(a, TupleArrow):
        return a.src
    return dom(a.before)


def cod(a: FPArrow) -> FPObject:
    if isinstance(a, Id):
        return a.obj
    if isinstance(a, Proj):
        return a.src.factors[a.index - 1]
    if isinstance(a, Gen):
        return Leaf(a.op.output)
    if isinstance(a, TupleArrow):
        return Prod(tuple(cod(p) for p in a.parts))
    return cod(a.after)


def ident(obj: FPObject) -> Id:
    return Id(obj)


def proj(src: Prod, index: int) -> Proj:
    return Proj(src, index)


def gen(op: Operation) -> Gen:
    return Gen(op)


def tuple_arrow(src: FPObject, parts: Sequence[FPArrow]) -> TupleArrow:
    return TupleArrow(src, tuple(parts))


def bang(src: FPObject) -> TupleArrow:
    """The unique arrow into the terminal object: the empty tuple."""
    return TupleArrow(src, ())


def compose(after: FPArrow, before: FPArrow) -> Comp:
    return Comp(after, before)


def product_of_arrows(fs: Sequence[FPArrow]) -> TupleArrow:
    """f1 x .. x fn as the tuple <f1 . p1, .., fn . pn> on the domain product."""
    src = Prod(tuple(dom(f) for f in fs))
    return TupleArrow(src, tuple(Comp(f, Proj(src, i))
                                 for i, f in enumerate(fs, 1)))


# --- normal forms ------------------------------------------------------------
#
# A normal body is shaped by the codomain: NTuple per product factor, and at
# a sort leaf a ground term (GenApp over Path leaves).  A Path addresses a
# leaf of the domain tree by its sequence of 1-based factor indices.


@dataclass(frozen=True, slots=True)
class Path:
    steps: tuple[int, ...]

    def __str__(self) -> str:
        return "p" + ".".join(str(s) for s in self.steps) if self.steps \
            else "p()"


@dataclass(frozen=True, slots=True)
class GenApp:
    op: Operation
    args: tuple["NormalBody", ...]

    def __str__(self) -> str:
        if not self.args:
            return self.op.name
        return f"{self.op.name}({', '.join(str(a) for a in self.args)})"


@dataclass(frozen=True, slots=True)
class NTuple:
    parts: tuple["NormalBody", ...]

    def __str__(self) -> str:
        return "<" + ", ".join(str(p) for p in self.parts) + ">"


NormalBody = Union[Path, GenApp, NTuple]


@dataclass(frozen=True, slots=True)
class NormalArrow:
    src: FPObject
    dst: FPObject
    body: NormalBody

    def __str__(self) -> str:
        return str(self.body)


def _identity_body(obj: FPObject, prefix: tuple[int, ...]) -> NormalBody:
    if isinstance(obj, Leaf):
        return Path(prefix)
    return NTuple(tuple(_identity_body(f, prefix + (i,))
                        for i, f in enumerate(obj.factors, 1)))


def _lookup(body: NormalBody, path: tuple[int, ...]) -> NormalBody:
    for step in path:
        body = body.parts[step - 1]
    return body


def _substitute(outer: NormalBody, inner: NormalBody) -> NormalBody:
    # Replace every path of `outer` (addresses into the middle object) by
    # the corresponding piece of `inner`.
    if isinstance(outer, Path):
        return _lookup(inner, outer.steps)
    if isinstance(outer, GenApp):
        return GenApp(outer.op, tuple(_substitute(a, inner)
                                      for a in outer.args))
    return NTuple(tuple(_substitute(p, inner) for p in outer.parts))


def _norm(a: FPArrow) -> NormalBody:
    if isinstance(a, Id):
        return _identity_body(a.obj, ())
    if isinstance(a, Proj):
        return _identity_body(a.src.factors[a.index - 1], (a.index,))
    if isinstance(a, Gen):
        return GenApp(a.op, tuple(Path((i,))
                                  for i in range(1, len(a.op.inputs) + 1)))
    if isinstance(a, TupleArrow):
        return NTuple(tuple(_norm(p) for p in a.parts))
    return _substitute(_norm(a.after), _norm(a.before))


def normalize(a: FPArrow) -> NormalArrow:
    return NormalArrow(dom(a), cod(a), _norm(a))


def embed(n: NormalArrow) -> FPArrow:
    """Turn a normal form back into raw arrow syntax."""
    return _embed_body(n.body, n.src)


def _embed_path(steps: tuple[int, ...], src: FPObject) -> FPArrow:
    arrow: FPArrow = Id(src)
    obj = src
    for step in steps:
        p = Proj(obj, step)
        arrow = p if isinstance(arrow, Id) else Comp(p, arrow)
        obj = cod(p)
    return arrow


def _embed_body(body: NormalBody, src: FPObject) -> FPArrow:
    if isinstance(body, Path):
        return _embed_path(body.steps, src)
    if isinstance(body, GenApp):
        inner = TupleArrow(src, tuple(_embed_body(a, src) for a in body.args))
        return Comp(Gen(body.op), inner)
    return TupleArrow(src, tuple(_embed_body(p, src) for p in body.parts))


def arrows_equal(a: FPArrow, b: FPArrow) -> bool:
    """Formal equality: identical normal forms over identical endpoints."""
    if dom(a) != dom(b) or cod(a) != cod(b):
        raise EndpointMismatch(
            f"arrows compared across different endpoints: "
            f"{dom(a)} -> {cod(a)} vs {dom(b)} -> {cod(b)}")
    return _norm(a) == _norm(b)


# --- the term compiler ----------------------------------------------------------


def input_product(t: Term) -> Prod:
    return flat_product(v.sort for v in t.vars)


def occurrence_arrow(t: Term) -> TupleArrow:
    """Declared-variable product onto the occurrence list of the expression.

    Component i is the projection picking out, from the term's variable
    product, the variable standing at occurrence i of the expression.
    """
    src = input_product(t)
    position = {v: k for k, v in enumerate(t.vars, 1)}
    return TupleArrow(src, tuple(Proj(src, position[v])
                                 for v in var_list(t.expr)))


def argument_shape(e: Expression) -> FPObject:
    """Domain of apply_arrow: the expression's argument tree over sort leaves."""
    if isinstance(e, Var):
        return Leaf(e.var.sort)
    return Prod(tuple(argument_shape(a) for a in e.args))


def regroup_arrow(e: Expression) -> FPArrow:
    """Canonical iso from the flat occurrence product to the argument tree.

    Realized as a tuple of paths; for a variable it is the one projection
    out of the singleton product.
    """
    src = flat_product(v.sort for v in var_list(e))
    counter = [0]

    def walk(shape: FPObject) -> FPArrow:
        if isinstance(shape, Leaf):
            counter[0] += 1
            return Proj(src, counter[0])
        return TupleArrow(src, tuple(walk(f) for f in shape.factors))

    return walk(argument_shape(e))


def apply_arrow(e: Expression) -> FPArrow:
    """Operation application: generators over the product of subresults."""
    if isinstance(e, Var):
        return Id(Leaf(e.var.sort))
    return Comp(Gen(e.op), product_of_arrows([apply_arrow(a)
                                              for a in e.args]))


def term_arrow(t: Term) -> FPArrow:
    return Comp(apply_arrow(t.expr),
                Comp(regroup_arrow(t.expr), occurrence_arrow(t)))


def equation_arrows(eq: Equation) -> tuple[FPArrow, FPArrow]:
    """The parallel pair of arrows associated to an equation."""
    left = term_arrow(Term(eq.left, eq.vars, eq.sort))
    right = term_arrow(Term(eq.right, eq.vars, eq.sort))
    return left, right
