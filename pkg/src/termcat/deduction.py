"""Equational deduction compiled to arrow-equality certificates.

A deduction tree applies the multisorted equational rules (reflexivity,
symmetry, transitivity, concretion, abstraction, substitutivity) over a
list of hypothesis equations.  Each accepted deduction compiles to a
`Factorization`: hypothesis constraints, claim constraints, workspace
constraints, and a verification assigning every claim a kernel proof.
Kernel steps are the congruence moves of arrow equality (reflexivity,
symmetry, transitivity, composing on either side, tuple congruence,
hypothesis citation); replaying them, with every comparison decided by
normal forms, checks the certificate without trusting its producer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

from .arrows import (Comp, FPArrow, FPObject, Proj, TupleArrow, arrows_equal,
                     cod, dom, equation_arrows, flat_product, term_arrow)
from .errors import (EndpointMismatch, InterfaceMismatch,
                     MiddleTermMismatch, SideConditionViolated,
                     UninhabitedFill, UnknownHypothesis)
from .signature import Signature, Variable, inhabited_sorts, ordered_vars
from .subst import (SubstInstance, retyping_arrow, subst_expr,
                    substitution_arrow)
from .terms import Equation, Term, make_equation, var_set

# --- rule instances -----------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Hypothesis:
    index: int


@dataclass(frozen=True, slots=True)
class Reflexivity:
    term: Term


@dataclass(frozen=True, slots=True)
class Symmetry:
    pass


@dataclass(frozen=True, slots=True)
class Transitivity:
    pass


@dataclass(frozen=True, slots=True)
class Concretion:
    var: Variable


@dataclass(frozen=True, slots=True)
class Abstraction:
    var: Variable


@dataclass(frozen=True, slots=True)
class Substitutivity:
    var: Variable


@dataclass(frozen=True, slots=True)
class Copy:
    """Carries an equation one level down unchanged; used by normalization."""


RuleInstance = Union[Hypothesis, Reflexivity, Symmetry, Transitivity,
                     Concretion, Abstraction, Substitutivity, Copy]

RULE_ARITY = {Hypothesis: 0, Reflexivity: 0, Symmetry: 1, Transitivity: 2,
              Concretion: 1, Abstraction: 1, Substitutivity: 2, Copy: 1}

RULE_NAMES = {Hypothesis: "hyp", Reflexivity: "refl", Symmetry: "sym",
              Transitivity: "trans", Concretion: "conc",
              Abstraction: "abs", Substitutivity: "subst", Copy: "copy"}


@dataclass(frozen=True)
class DeductionTree:
    conclusion: Equation
    rule: RuleInstance
    premises: tuple["DeductionTree", ...] = ()

    def __post_init__(self):
        want = RULE_ARITY[type(self.rule)]
        if len(self.premises) != want:
            raise SideConditionViolated(
                f"{RULE_NAMES[type(self.rule)]} takes {want} premises, "
                f"got {len(self.premises)}")


# --- constraints and kernel steps -----------------------------------------------


@dataclass(frozen=True, slots=True)
class EqConstraint:
    left: FPArrow
    right: FPArrow

    def __post_init__(self):
        if dom(self.left) != dom(self.right) \
                or cod(self.left) != cod(self.right):
            raise EndpointMismatch(
                "constraint sides have different endpoints")

    def __str__(self) -> str:
        return f"{self.left}  ==  {self.right}"


def equation_constraint(eq: Equation) -> EqConstraint:
    return EqConstraint(*equation_arrows(eq))


@dataclass(frozen=True, slots=True)
class CiteHyp:
    hyp: int


@dataclass(frozen=True, slots=True)
class Refl:
    arrow: FPArrow


@dataclass(frozen=True, slots=True)
class Sym:
    of: int


@dataclass(frozen=True, slots=True)
class Trans:
    first: int
    second: int


@dataclass(frozen=True, slots=True)
class ComposeLeft:
    arrow: FPArrow
    of: int


@dataclass(frozen=True, slots=True)
class ComposeRight:
    arrow: FPArrow
    of: int


@dataclass(frozen=True, slots=True)
class TupleCong:
    src: FPObject
    of: tuple[int, ...]


KernelStep = Union[CiteHyp, Refl, Sym, Trans, ComposeLeft, ComposeRight,
                   TupleCong]

KernelProof = tuple[KernelStep, ...]


@dataclass
class Factorization:
    hyp: tuple[EqConstraint, ...]
    claim: tuple[EqConstraint, ...]
    wksp: tuple[EqConstraint, ...]
    verif: tuple[KernelProof, ...]  # one proof per claim, in order
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.verif) != len(self.claim):
            raise SideConditionViolated(
                "verification must carry one kernel proof per claim")


def identity_factorization(constraints: Sequence[EqConstraint]
                           ) -> Factorization:
    cs = tuple(constraints)
    return Factorization(hyp=cs, claim=cs, wksp=(),
                         verif=tuple((CiteHyp(i),) for i in range(len(cs))))


@dataclass(frozen=True)
class CodedStep:
    premises: tuple[EqConstraint, ...]
    conclusion: EqConstraint
    proof: KernelProof

    def factorization(self) -> Factorization:
        return Factorization(hyp=self.premises, claim=(self.conclusion,),
                             wksp=(), verif=(self.proof,))


# --- rule checking and coding ------------------------------------------------------


def _require(cond: bool, detail: str):
    if not cond:
        raise SideConditionViolated(detail)


def check_rule(sig: Signature, premises: Sequence[Equation],
               rule: RuleInstance, conclusion: Equation,
               hypotheses: Sequence[Equation] | None = None) -> CodedStep:
    """Validate one rule application and produce its arrow-level coding."""
    want = RULE_ARITY[type(rule)]
    _require(len(premises) == want,
             f"{RULE_NAMES[type(rule)]} takes {want} premises")
    prem_cs = tuple(equation_constraint(p) for p in premises)
    concl_c = equation_constraint(conclusion)

    if isinstance(rule, Hypothesis):
        if hypotheses is None or not 0 <= rule.index < len(hypotheses):
            raise UnknownHypothesis(rule.index)
        _require(conclusion == hypotheses[rule.index],
                 "cited hypothesis does not match the conclusion")
        return CodedStep((concl_c,), concl_c, (CiteHyp(0),))

    if isinstance(rule, Copy):
        _require(conclusion == premises[0],
                 "copy must repeat its premise unchanged")
        return CodedStep(prem_cs, concl_c, (CiteHyp(0),))

    if isinstance(rule, Reflexivity):
        t = rule.term
        _require(conclusion.left == t.expr and conclusion.right == t.expr,
                 "reflexivity conclusion must equate the term with itself")
        _require(conclusion.vars == t.vars,
                 "reflexivity conclusion has the wrong variable set")
        f = term_arrow(t)
        return CodedStep((), concl_c, (Refl(f),))

    if isinstance(rule, Symmetry):
        p = premises[0]
        _require(conclusion.left == p.right and conclusion.right == p.left,
                 "symmetry must swap the sides")
        _require(conclusion.vars == p.vars,
                 "symmetry must keep the variable set")
        return CodedStep(prem_cs, concl_c, (CiteHyp(0), Sym(0)))

    if isinstance(rule, Transitivity):
        p1, p2 = premises
        _require(p1.vars == p2.vars,
                 "transitivity premises must share the variable set")
        if p1.sort != p2.sort:
            raise MiddleTermMismatch(
                f"premises have different sorts: {p1.sort} vs {p2.sort}")
        if not arrows_equal(*equation_arrows(
                make_equation(p1.right, p2.left, p1.vars))):
            raise MiddleTermMismatch(
                f"premises do not share a middle term: "
                f"{p1.right} vs {p2.left}")
        _require(conclusion.left == p1.left
                 and conclusion.right == p2.right
                 and conclusion.vars == p1.vars,
                 "transitivity conclusion must chain the outer sides")
        return CodedStep(prem_cs, concl_c, (CiteHyp(0), CiteHyp(1),
                                            Trans(0, 1)))

    if isinstance(rule, Concretion):
        p = premises[0]
        x = rule.var
        _require(x in p.vars, f"{x} is not among the premise variables")
        _require(x not in var_set(p.left) and x not in var_set(p.right),
                 f"{x} occurs in the equation and cannot be removed")
        kept = tuple(v for v in p.vars if v != x)
        _require(conclusion.left == p.left and conclusion.right == p.right
                 and conclusion.vars == kept,
                 "concretion conclusion must drop exactly the chosen "
                 "variable")
        witnesses = inhabited_sorts(sig)
        if x.sort not in witnesses:
            raise UninhabitedFill(x.sort)
        h = retyping_arrow(kept, p.vars, witnesses)
        return CodedStep(prem_cs, concl_c,
                         (CiteHyp(0), ComposeRight(h, 0)))

    if isinstance(rule, Abstraction):
        p = premises[0]
        x = rule.var
        _require(x not in p.vars, f"{x} already occurs among the premise "
                 "variables")
        grown = ordered_vars(p.vars + (x,))
        _require(conclusion.left == p.left and conclusion.right == p.right
                 and conclusion.vars == grown,
                 "abstraction conclusion must add exactly the chosen "
                 "variable")
        h = retyping_arrow(grown, p.vars, {})
        return CodedStep(prem_cs, concl_c,
                         (CiteHyp(0), ComposeRight(h, 0)))

    if isinstance(rule, Substitutivity):
        p1, p2 = premises
        x = rule.var
        _require(x in p1.vars, f"{x} is not among the first premise's "
                 "variables")
        _require(p2.sort == x.sort,
                 f"second premise has sort {p2.sort}, but {x} requires "
                 f"{x.sort}")
        inst = SubstInstance(Term(p1.left, p1.vars, p1.sort), x,
                             Term(p2.left, p2.vars, p2.sort))
        result = inst.result_vars()
        union = inst.union_vars()
        _require(conclusion.left == subst_expr(p1.left, x, p2.left)
                 and conclusion.right == subst_expr(p1.right, x, p2.right)
                 and conclusion.vars == result,
                 "substitutivity conclusion must substitute both sides over "
                 "the combined variable set")
        alpha = retyping_arrow(union, p1.vars, {})
        beta = retyping_arrow(result, p2.vars, {})
        a_fwd = substitution_arrow(inst)
        # Kernel derivation: widen the first premise to the union product,
        # derive the substituted-slot pair from the second premise, assemble
        # the pair of substitution arrows by tuple congruence, then compose.
        steps: list[KernelStep] = [
            CiteHyp(0),               # 0: (f, f') over the premise product
            CiteHyp(1),               # 1: (g, g') over the replacement product
            ComposeRight(alpha, 0),   # 2: widened first premise
            ComposeRight(beta, 1),    # 3: the substituted coordinate pair
        ]
        slot = union.index(x)
        refs: list[int] = []
        src = flat_product(v.sort for v in result)
        position = {v: k for k, v in enumerate(result, 1)}
        for i, v in enumerate(union):
            if i == slot:
                refs.append(3)
            else:
                steps.append(Refl(Proj(src, position[v])))
                refs.append(len(steps) - 1)
        steps.append(TupleCong(src, tuple(refs)))
        cong = len(steps) - 1        # (A, A') up to normalization
        f_alpha_right = Comp(prem_cs[0].right, alpha)
        steps.append(ComposeRight(a_fwd, 2))            # (f.a.A, f'.a.A)
        steps.append(ComposeLeft(f_alpha_right, cong))  # (f'.a.A, f'.a.A')
        steps.append(Trans(len(steps) - 2, len(steps) - 1))
        return CodedStep(prem_cs, concl_c, tuple(steps))

    raise SideConditionViolated(f"unknown rule {rule!r}")


# --- certificate algebra ---------------------------------------------------------


def _shift_step(step: KernelStep, ref_map, hyp_shift: int) -> KernelStep:
    if isinstance(step, CiteHyp):
        return CiteHyp(step.hyp + hyp_shift)
    if isinstance(step, Sym):
        return Sym(ref_map(step.of))
    if isinstance(step, Trans):
        return Trans(ref_map(step.first), ref_map(step.second))
    if isinstance(step, ComposeLeft):
        return ComposeLeft(step.arrow, ref_map(step.of))
    if isinstance(step, ComposeRight):
        return ComposeRight(step.arrow, ref_map(step.of))
    if isinstance(step, TupleCong):
        return TupleCong(step.src, tuple(ref_map(i) for i in step.of))
    return step


def product_factorizations(fs: Sequence[Factorization]) -> Factorization:
    """Side-by-side juxtaposition: concatenate everything, shifting the
    hypothesis citations of later factors."""
    hyp: list[EqConstraint] = []
    claim: list[EqConstraint] = []
    wksp: list[EqConstraint] = []
    verif: list[KernelProof] = []
    for f in fs:
        shift = len(hyp)
        hyp.extend(f.hyp)
        claim.extend(f.claim)
        wksp.extend(f.wksp)
        for proof in f.verif:
            verif.append(tuple(_shift_step(s, lambda i: i, shift)
                               for s in proof))
    return Factorization(tuple(hyp), tuple(claim), tuple(wksp),
                         tuple(verif))


def _constraints_match(xs: Sequence[EqConstraint],
                       ys: Sequence[EqConstraint]) -> bool:
    if len(xs) != len(ys):
        return False
    try:
        return all(x == y or (arrows_equal(x.left, y.left)
                              and arrows_equal(x.right, y.right))
                   for x, y in zip(xs, ys))
    except EndpointMismatch:
        return False


def paste_factorizations(f1: Factorization,
                         f2: Factorization) -> Factorization:
    """Chain two certificates whose interface lines up: the first derives
    exactly what the second assumes.  Each hypothesis citation in the second
    certificate's proofs is replaced by the first certificate's proof of the
    matching claim, so the combined proofs run from f1's hypotheses straight
    through to f2's claims."""
    if not _constraints_match(f1.claim, f2.hyp):
        raise InterfaceMismatch(
            f"cannot paste: {len(f1.claim)} derived constraints vs "
            f"{len(f2.hyp)} assumed, or a constraint pair differs")
    verif: list[KernelProof] = []
    for proof in f2.verif:
        out: list[KernelStep] = []
        where: dict[int, int] = {}
        for j, step in enumerate(proof):
            if isinstance(step, CiteHyp):
                inlined = f1.verif[step.hyp]
                base = len(out)
                for s in inlined:
                    out.append(_shift_step(s, lambda i: i + base, 0))
                where[j] = len(out) - 1
            else:
                out.append(_shift_step(step, lambda i: where[i], 0))
                where[j] = len(out) - 1
        verif.append(tuple(out))
    return Factorization(f1.hyp, f2.claim,
                         f1.wksp + f1.claim + f2.wksp, tuple(verif))


# --- verification --------------------------------------------------------------


@dataclass
class VerificationResult:
    ok: bool
    trace: tuple[str, ...]

    def __bool__(self) -> bool:
        return self.ok


def _replay(hyp: Sequence[EqConstraint], proof: KernelProof,
            trace: list[str]) -> EqConstraint | None:
    derived: list[EqConstraint] = []
    for n, step in enumerate(proof):
        try:
            if isinstance(step, CiteHyp):
                if not 0 <= step.hyp < len(hyp):
                    trace.append(f"step {n}: citation of missing "
                                 f"hypothesis {step.hyp}")
                    return None
                derived.append(hyp[step.hyp])
            elif isinstance(step, Refl):
                derived.append(EqConstraint(step.arrow, step.arrow))
            elif isinstance(step, Sym):
                c = derived[step.of]
                derived.append(EqConstraint(c.right, c.left))
            elif isinstance(step, Trans):
                c1, c2 = derived[step.first], derived[step.second]
                if not arrows_equal(c1.right, c2.left):
                    trace.append(f"step {n}: transitivity middle terms are "
                                 "not formally equal")
                    return None
                derived.append(EqConstraint(c1.left, c2.right))
            elif isinstance(step, ComposeLeft):
                c = derived[step.of]
                derived.append(EqConstraint(Comp(step.arrow, c.left),
                                            Comp(step.arrow, c.right)))
            elif isinstance(step, ComposeRight):
                c = derived[step.of]
                derived.append(EqConstraint(Comp(c.left, step.arrow),
                                            Comp(c.right, step.arrow)))
            elif isinstance(step, TupleCong):
                cs = [derived[i] for i in step.of]
                derived.append(EqConstraint(
                    TupleArrow(step.src, tuple(c.left for c in cs)),
                    TupleArrow(step.src, tuple(c.right for c in cs))))
            else:
                trace.append(f"step {n}: unknown kernel step {step!r}")
                return None
        except (EndpointMismatch, IndexError) as exc:
            trace.append(f"step {n}: {exc}")
            return None
    if not derived:
        trace.append("empty kernel proof derives nothing")
        return None
    return derived[-1]


def verify_factorization(f: Factorization) -> VerificationResult:
    """Replay every kernel proof and re-check every claimed equality."""
    trace: list[str] = []
    ok = True
    for k, (constraint, proof) in enumerate(zip(f.claim, f.verif)):
        got = _replay(f.hyp, proof, trace)
        if got is None:
            trace.append(f"claim {k}: kernel proof failed to replay")
            ok = False
            continue
        try:
            good = arrows_equal(got.left, constraint.left) \
                and arrows_equal(got.right, constraint.right)
        except EndpointMismatch:
            good = False
        if good:
            trace.append(f"claim {k}: established")
        else:
            trace.append(f"claim {k}: derived constraint differs from the "
                         "claim")
            ok = False
    return VerificationResult(ok, tuple(trace))


# --- whole deductions --------------------------------------------------------------


def check_deduction(sig: Signature, tree: DeductionTree,
                    hypotheses: Sequence[Equation]) -> Factorization:
    """Validate every node and assemble the tree-shaped certificate.

    The certificate's hypothesis list is the given hypothesis list in
    declaration order (the set reading: repeated uses cite the same entry);
    its claim is the conclusion's constraint pair.
    """
    hypotheses = tuple(hypotheses)

    def build(node: DeductionTree) -> tuple[Factorization, tuple[int, ...]]:
        rule = node.rule
        if isinstance(rule, Hypothesis):
            step = check_rule(sig, (), rule, node.conclusion,
                              hypotheses=hypotheses)
            c = step.conclusion
            return (Factorization((c,), (c,), (), ((CiteHyp(0),),)),
                    (rule.index,))
        if isinstance(rule, Reflexivity):
            step = check_rule(sig, (), rule, node.conclusion)
            return step.factorization(), ()
        sub = [build(p) for p in node.premises]
        prem_cert = product_factorizations([c for c, _ in sub])
        origins = tuple(i for _, o in sub for i in o)
        step = check_rule(sig, [p.conclusion for p in node.premises],
                          rule, node.conclusion)
        pasted = paste_factorizations(prem_cert, step.factorization())
        return pasted, origins

    cert, origins = build(tree)
    hyp = tuple(equation_constraint(h) for h in hypotheses)
    verif = tuple(
        tuple(CiteHyp(origins[s.hyp]) if isinstance(s, CiteHyp) else s
              for s in proof)
        for proof in cert.verif)
    out = Factorization(hyp, cert.claim, cert.wksp, verif)
    out.meta["hypothesis_reading"] = \
        "repeated hypothesis uses cite one shared entry"
    return out


# --- normal form for deductions ------------------------------------------------------


@dataclass(frozen=True)
class LevelStep:
    equation: Equation
    rule: RuleInstance
    premises: tuple[int, ...]  # indices into the previous level


@dataclass(frozen=True)
class LevelledDeduction:
    levels: tuple[tuple[LevelStep, ...], ...]

    @property
    def conclusion(self) -> Equation:
        return self.levels[-1][-1].equation


def _natural_level(node: DeductionTree) -> int:
    if not node.premises:
        return 0
    return 1 + max(_natural_level(p) for p in node.premises)


def normalize_deduction(tree: DeductionTree) -> LevelledDeduction:
    """Levelled form: premises sit exactly one level below their conclusion
    (copy steps fill gaps) and every intermediate equation feeds exactly
    one step of the next level (shared subtrees are duplicated)."""
    top = _natural_level(tree)
    levels: list[list[LevelStep]] = [[] for _ in range(top + 1)]

    def place(node: DeductionTree, level: int) -> int:
        natural = _natural_level(node)
        if level > natural:
            below = place(node, level - 1)
            levels[level].append(LevelStep(node.conclusion, Copy(),
                                           (below,)))
        else:
            prem = tuple(place(p, level - 1) for p in node.premises)
            levels[level].append(LevelStep(node.conclusion, node.rule, prem))
        return len(levels[level]) - 1

    place(tree, top)
    return LevelledDeduction(tuple(tuple(lv) for lv in levels))


def normal_form_violations(ld: LevelledDeduction) -> list[str]:
    """Machine check of the two normal-form properties."""
    problems: list[str] = []
    for s in ld.levels[0]:
        if not isinstance(s.rule, (Hypothesis, Reflexivity)):
            problems.append(f"level 0 contains a {RULE_NAMES[type(s.rule)]} "
                            "step with premises")
        if s.premises:
            problems.append("level 0 step cites premises")
    for l in range(1, len(ld.levels)):
        width_prev = len(ld.levels[l - 1])
        used = [0] * width_prev
        for s in ld.levels[l]:
            want = RULE_ARITY[type(s.rule)]
            if len(s.premises) != want:
                problems.append(f"level {l}: wrong premise count")
            for i in s.premises:
                if not 0 <= i < width_prev:
                    problems.append(f"level {l}: premise index {i} out of "
                                    "range")
                else:
                    used[i] += 1
        for i, n in enumerate(used):
            if n != 1:
                problems.append(f"level {l - 1} entry {i} consumed {n} "
                                "times")
    if len(ld.levels[-1]) != 1:
        problems.append("last level must hold exactly the conclusion")
    return problems


def compile_to_factorization(sig: Signature, ld: LevelledDeduction,
                             hypotheses: Sequence[Equation]) -> Factorization:
    """Assemble the levelled deduction into one certificate.

    Per level: the product of the level's rule codings, grouped in step
    order.  Across levels: the running certificate's claims are reordered to
    the consumption order of the next level (the associativity re-indexing)
    and pasted.  Finally the hypothesis entries, duplicated once per use at
    level 0, are folded back onto the given hypothesis list.
    """
    hypotheses = tuple(hypotheses)
    bad = normal_form_violations(ld)
    if bad:
        raise SideConditionViolated("deduction is not in normal form: "
                                    + "; ".join(bad))

    origins: list[int] = []
    certs: list[Factorization] = []
    for s in ld.levels[0]:
        step = check_rule(sig, (), s.rule, s.equation,
                          hypotheses=hypotheses)
        if isinstance(s.rule, Hypothesis):
            c = step.conclusion
            certs.append(Factorization((c,), (c,), (), ((CiteHyp(0),),)))
            origins.append(s.rule.index)
        else:
            certs.append(step.factorization())
    running = product_factorizations(certs)

    partitions: list[list[list[int]]] = []
    for l in range(1, len(ld.levels)):
        prev_eqs = [s.equation for s in ld.levels[l - 1]]
        step_certs: list[Factorization] = []
        consumed: list[int] = []
        for s in ld.levels[l]:
            coded = check_rule(sig, [prev_eqs[i] for i in s.premises],
                               s.rule, s.equation, hypotheses=hypotheses)
            step_certs.append(coded.factorization())
            consumed.extend(s.premises)
        partitions.append([list(s.premises) for s in ld.levels[l]])
        level_cert = product_factorizations(step_certs)
        reordered = Factorization(
            running.hyp,
            tuple(running.claim[i] for i in consumed),
            running.wksp,
            tuple(running.verif[i] for i in consumed),
            dict(running.meta))
        running = paste_factorizations(reordered, level_cert)

    hyp = tuple(equation_constraint(h) for h in hypotheses)
    verif = tuple(
        tuple(CiteHyp(origins[s.hyp]) if isinstance(s, CiteHyp) else s
              for s in proof)
        for proof in running.verif)
    out = Factorization(hyp, running.claim, running.wksp, verif)
    out.meta["level_partitions"] = partitions
    out.meta["hypothesis_reading"] = \
        "repeated hypothesis uses cite one shared entry"
    return out
