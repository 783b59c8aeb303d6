"""Sorts, operations, variables, and the inhabitedness analysis.

A signature is a finite list of sorts plus operations, each with an
input-sort list (its arity) and an output sort.  Variables are indexed pairs
(sort, subscript) and carry a canonical total order: first by the sort's
declaration index, then by subscript.  Everything downstream (input-type
lists, projection indices) leans on that order being fixed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Sequence

from .errors import DuplicateOperation, DuplicateSort, UnknownSortInArity

if TYPE_CHECKING:
    from .terms import Expression


@dataclass(frozen=True, slots=True)
class Sort:
    index: int  # position in the owning signature's declaration list
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Operation:
    name: str
    inputs: tuple[Sort, ...]
    output: Sort

    def __str__(self) -> str:
        inp = " ".join(s.name for s in self.inputs)
        return f"{self.name} : {inp} -> {self.output.name}" if inp else \
            f"{self.name} : -> {self.output.name}"


@dataclass(frozen=True, slots=True)
class Variable:
    sort: Sort
    num: int  # 1-based subscript within the sort

    def key(self) -> tuple[int, int]:
        return (self.sort.index, self.num)

    def __lt__(self, other: "Variable") -> bool:
        return self.key() < other.key()

    def __str__(self) -> str:
        return f"x{self.num}:{self.sort.name}"


def ordered_vars(vs: Iterable[Variable]) -> tuple[Variable, ...]:
    """Duplicate-free tuple in the canonical (sort index, subscript) order."""
    return tuple(sorted(set(vs), key=Variable.key))


@dataclass(frozen=True, slots=True)
class Signature:
    sorts: tuple[Sort, ...]
    operations: tuple[Operation, ...]

    def sort(self, name: str) -> Sort:
        for s in self.sorts:
            if s.name == name:
                return s
        raise KeyError(name)

    def operation(self, name: str) -> Operation:
        for op in self.operations:
            if op.name == name:
                return op
        raise KeyError(name)

    def constants(self) -> tuple[Operation, ...]:
        return tuple(op for op in self.operations if is_constant(op))


def validate_signature(
    sort_names: Sequence[str],
    op_decls: Sequence[tuple[str, Sequence[str], str]],
) -> Signature:
    """Build a signature from raw names, enforcing the uniqueness rules.

    `op_decls` entries are (name, input sort names, output sort name).
    """
    seen: set[str] = set()
    sorts: list[Sort] = []
    for i, name in enumerate(sort_names):
        if name in seen:
            raise DuplicateSort(f"sort {name!r} declared twice")
        seen.add(name)
        sorts.append(Sort(i, name))
    by_name = {s.name: s for s in sorts}

    ops: list[Operation] = []
    op_seen: set[str] = set()
    for name, inputs, output in op_decls:
        if name in op_seen:
            raise DuplicateOperation(f"operation {name!r} declared twice")
        op_seen.add(name)
        for sn in tuple(inputs) + (output,):
            if sn not in by_name:
                raise UnknownSortInArity(
                    f"operation {name!r} mentions unknown sort {sn!r}")
        ops.append(Operation(name, tuple(by_name[sn] for sn in inputs),
                             by_name[output]))
    return Signature(tuple(sorts), tuple(ops))


def is_constant(op: Operation) -> bool:
    return not op.inputs


def inhabited_sorts(sig: Signature) -> dict[Sort, "Expression"]:
    """Sorts possessing a closed expression, with a canonical witness each.

    Least fixpoint: a sort is inhabited iff some operation of that output
    sort has all input sorts already inhabited.  The witness is the
    smallest-depth closed expression; ties go to the earliest operation in
    declaration order.  Round k of the loop assigns exactly the sorts whose
    minimal witness depth is k, so both rules hold by construction.
    """
    from .terms import App  # deferred: terms imports this module

    witness: dict[Sort, App] = {}
    while True:
        fresh: dict[Sort, App] = {}
        for op in sig.operations:
            if op.output in witness or op.output in fresh:
                continue
            if all(s in witness for s in op.inputs):
                fresh[op.output] = App(op, tuple(witness[s] for s in op.inputs))
        if not fresh:
            break
        witness.update(fresh)
    return {s: witness[s] for s in sig.sorts if s in witness}
