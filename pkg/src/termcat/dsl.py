"""The .msl front end: parsing, printing, and proof elaboration.

The format is line-oriented:

    sort <name>+
    op <name> : <sort>* -> <sort>
    term <name> [<var>:<sort>, ...] : <expr>
    eq <name> [<var>:<sort>, ...] : <expr> = <expr>
    proof <name> from <eqname>* {
      <step> = hyp <eqname> ;
      <step> = refl [<var>:<sort>, ...] <expr> ;
      <step> = sym <step> ;
      <step> = trans <step> <step> ;
      <step> = conc <step> <var> ;
      <step> = abs <step> <var> : <sort> ;
      <step> = subst <step> <var> <step> ;
    }

Comments run from `#` to end of line.  Variables are scoped to their
declaration bracket; the subscript of a variable is its rank among the
bracket's variables of the same sort, counted in bracket order, so the
canonical variable order (and with it every projection index) is fixed by
the text alone.  Within a proof, variable names travel with the derived
equations: cited equations contribute their bracket names, merges drop
ambiguous names, and `abs` binds its name to the variable it introduces.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

from .deduction import (Abstraction, Concretion, DeductionTree,
                        Hypothesis, Reflexivity, Substitutivity, Symmetry,
                        Transitivity)
from .errors import (DeductionError, DslSyntaxError, NameResolutionError,
                     SideConditionViolated, TermcatError)
from .signature import Signature, Sort, Variable, ordered_vars, validate_signature
from .subst import subst_expr
from .terms import (App, Equation, Expression, Var, make_equation,
                    make_term)

# --- tokens ------------------------------------------------------------------

_TOKEN_RE = re.compile(r"->|[()\[\]{}:,;=]|[A-Za-z_][A-Za-z0-9_]*|\S")

_SYMBOLS = {"(": "LPAREN", ")": "RPAREN", "[": "LBRACK", "]": "RBRACK",
            "{": "LBRACE", "}": "RBRACE", ":": "COLON", ",": "COMMA",
            ";": "SEMI", "=": "EQUALS", "->": "ARROW"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    for ln, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0]
        for m in _TOKEN_RE.finditer(line):
            word = m.group(0)
            col = m.start() + 1
            if word in _SYMBOLS:
                out.append(Token(_SYMBOLS[word], word, ln, col))
            elif re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", word):
                out.append(Token("NAME", word, ln, col))
            else:
                raise DslSyntaxError(f"unexpected character {word!r}", ln, col)
        out.append(Token("NEWLINE", "", ln, len(line) + 1))
    out.append(Token("EOF", "", len(text.splitlines()) + 1, 1))
    return out


# --- raw syntax ----------------------------------------------------------------


@dataclass(frozen=True)
class RawName:
    name: str
    line: int = field(compare=False, default=0)
    col: int = field(compare=False, default=0)


@dataclass(frozen=True)
class RawCall:
    name: str
    args: tuple["RawExpr", ...]
    line: int = field(compare=False, default=0)
    col: int = field(compare=False, default=0)


RawExpr = Union[RawName, RawCall]

Bracket = tuple[tuple[str, str], ...]  # (variable name, sort name) pairs


@dataclass(frozen=True)
class StepDef:
    name: str
    rule: str
    eq_name: Optional[str] = None
    steps: tuple[str, ...] = ()
    var_name: Optional[str] = None
    sort_name: Optional[str] = None
    bracket: Optional[Bracket] = None
    expr: Optional[RawExpr] = None
    line: int = field(compare=False, default=0)
    col: int = field(compare=False, default=0)


@dataclass(frozen=True)
class ProofDef:
    name: str
    hypotheses: tuple[str, ...]  # equation names, in citation order
    steps: tuple[StepDef, ...]


@dataclass(frozen=True)
class TermDecl:
    name: str
    bracket: Bracket
    expr: RawExpr


@dataclass(frozen=True)
class EqDecl:
    name: str
    bracket: Bracket
    left: RawExpr
    right: RawExpr


@dataclass
class SpecFile:
    signature: Signature
    sort_names: tuple[str, ...]
    op_decls: tuple[tuple[str, tuple[str, ...], str], ...]
    term_decls: tuple[TermDecl, ...]
    eq_decls: tuple[EqDecl, ...]
    proofs: tuple[ProofDef, ...]
    terms: dict[str, Term] = field(default_factory=dict)
    equations: dict[str, Equation] = field(default_factory=dict)
    eq_bindings: dict[str, dict[str, Variable]] = field(default_factory=dict)

    def __eq__(self, other):
        if not isinstance(other, SpecFile):
            return NotImplemented
        return (self.sort_names, self.op_decls, self.term_decls,
                self.eq_decls, self.proofs) == \
               (other.sort_names, other.op_decls, other.term_decls,
                other.eq_decls, other.proofs)

    def proof(self, name: str) -> ProofDef:
        for p in self.proofs:
            if p.name == name:
                return p
        raise KeyError(name)


# --- parser --------------------------------------------------------------------


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self, skip_newlines=False) -> Token:
        i = self.pos
        while skip_newlines and self.tokens[i].kind == "NEWLINE":
            i += 1
        return self.tokens[i]

    def next(self, skip_newlines=False) -> Token:
        while skip_newlines and self.tokens[self.pos].kind == "NEWLINE":
            self.pos += 1
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, skip_newlines=False) -> Token:
        tok = self.next(skip_newlines)
        if tok.kind != kind:
            raise DslSyntaxError(
                f"expected {kind}, found {tok.text or tok.kind!r}",
                tok.line, tok.col)
        return tok

    def end_line(self):
        tok = self.next()
        if tok.kind not in ("NEWLINE", "EOF"):
            raise DslSyntaxError(
                f"unexpected {tok.text!r} at end of statement",
                tok.line, tok.col)

    def names_until(self, stop_kinds) -> list[Token]:
        out = []
        while self.peek().kind == "NAME":
            out.append(self.next())
        if self.peek().kind not in stop_kinds:
            tok = self.peek()
            raise DslSyntaxError(f"unexpected {tok.text or tok.kind!r}",
                                 tok.line, tok.col)
        return out

    def bracket(self) -> Bracket:
        entries: list[tuple[str, str]] = []
        self.expect("LBRACK")
        if self.peek().kind != "RBRACK":
            while True:
                name = self.expect("NAME")
                self.expect("COLON")
                sort = self.expect("NAME")
                entries.append((name.text, sort.text))
                if self.peek().kind == "COMMA":
                    self.next()
                    continue
                break
        self.expect("RBRACK")
        return tuple(entries)

    def expr(self) -> RawExpr:
        head = self.expect("NAME", skip_newlines=True)
        if self.peek().kind == "LPAREN":
            self.next()
            args: list[RawExpr] = []
            if self.peek(skip_newlines=True).kind != "RPAREN":
                while True:
                    args.append(self.expr())
                    if self.peek(skip_newlines=True).kind == "COMMA":
                        self.next(skip_newlines=True)
                        continue
                    break
            self.expect("RPAREN", skip_newlines=True)
            return RawCall(head.text, tuple(args), head.line, head.col)
        return RawName(head.text, head.line, head.col)


def _parse_raw(text: str):
    p = _Parser(_tokenize(text))
    sort_names: list[str] = []
    op_decls: list[tuple[str, tuple[str, ...], str]] = []
    term_decls: list[TermDecl] = []
    eq_decls: list[EqDecl] = []
    proofs: list[ProofDef] = []

    while True:
        tok = p.peek(skip_newlines=True)
        if tok.kind == "EOF":
            break
        tok = p.next(skip_newlines=True)
        if tok.kind != "NAME":
            raise DslSyntaxError(f"expected a statement, found {tok.text!r}",
                                 tok.line, tok.col)
        if tok.text == "sort":
            names = p.names_until(("NEWLINE", "EOF"))
            if not names:
                raise DslSyntaxError("sort statement names no sorts",
                                     tok.line, tok.col)
            sort_names.extend(n.text for n in names)
            p.end_line()
        elif tok.text == "op":
            name = p.expect("NAME")
            p.expect("COLON")
            inputs = [t.text for t in p.names_until(("ARROW",))]
            p.expect("ARROW")
            output = p.expect("NAME")
            p.end_line()
            op_decls.append((name.text, tuple(inputs), output.text))
        elif tok.text == "term":
            name = p.expect("NAME")
            bracket = p.bracket() if p.peek().kind == "LBRACK" else ()
            p.expect("COLON")
            expr = p.expr()
            p.end_line()
            term_decls.append(TermDecl(name.text, bracket, expr))
        elif tok.text == "eq":
            name = p.expect("NAME")
            bracket = p.bracket() if p.peek().kind == "LBRACK" else ()
            p.expect("COLON")
            left = p.expr()
            p.expect("EQUALS")
            right = p.expr()
            p.end_line()
            eq_decls.append(EqDecl(name.text, bracket, left, right))
        elif tok.text == "proof":
            proofs.append(_parse_proof(p))
        else:
            raise DslSyntaxError(f"unknown statement {tok.text!r}",
                                 tok.line, tok.col)
    return (tuple(sort_names), tuple(op_decls), tuple(term_decls),
            tuple(eq_decls), tuple(proofs))


def _parse_proof(p: _Parser) -> ProofDef:
    name = p.expect("NAME")
    kw = p.expect("NAME")
    if kw.text != "from":
        raise DslSyntaxError("expected 'from'", kw.line, kw.col)
    hyps = [t.text for t in p.names_until(("LBRACE",))]
    p.expect("LBRACE")
    steps: list[StepDef] = []
    while True:
        tok = p.peek(skip_newlines=True)
        if tok.kind == "RBRACE":
            p.next(skip_newlines=True)
            break
        sname = p.expect("NAME", skip_newlines=True)
        p.expect("EQUALS")
        rule = p.expect("NAME")
        kind = rule.text
        kw_args: dict = dict(line=sname.line, col=sname.col)
        if kind == "hyp":
            kw_args["eq_name"] = p.expect("NAME").text
        elif kind == "refl":
            bracket = p.bracket() if p.peek().kind == "LBRACK" else ()
            kw_args["bracket"] = bracket
            kw_args["expr"] = p.expr()
        elif kind == "sym":
            kw_args["steps"] = (p.expect("NAME").text,)
        elif kind == "trans":
            kw_args["steps"] = (p.expect("NAME").text, p.expect("NAME").text)
        elif kind == "conc":
            kw_args["steps"] = (p.expect("NAME").text,)
            kw_args["var_name"] = p.expect("NAME").text
        elif kind == "abs":
            kw_args["steps"] = (p.expect("NAME").text,)
            kw_args["var_name"] = p.expect("NAME").text
            p.expect("COLON")
            kw_args["sort_name"] = p.expect("NAME").text
        elif kind == "subst":
            first = p.expect("NAME").text
            kw_args["var_name"] = p.expect("NAME").text
            kw_args["steps"] = (first, p.expect("NAME").text)
        else:
            raise DslSyntaxError(f"unknown rule {kind!r}", rule.line, rule.col)
        p.expect("SEMI")
        steps.append(StepDef(sname.text, kind, **kw_args))
    if not steps:
        raise DslSyntaxError(f"proof {name.text!r} has no steps",
                             name.line, name.col)
    return ProofDef(name.text, tuple(hyps), tuple(steps))


# --- elaboration ----------------------------------------------------------------


def _bind_bracket(sig: Signature, bracket: Bracket, line: int,
                  col: int) -> dict[str, Variable]:
    binding: dict[str, Variable] = {}
    per_sort: dict[Sort, int] = {}
    op_names = {op.name for op in sig.operations}
    for vname, sname in bracket:
        if vname in binding:
            raise NameResolutionError(
                f"variable {vname!r} declared twice in one bracket", line, col)
        if vname in op_names:
            raise NameResolutionError(
                f"variable {vname!r} shadows an operation", line, col)
        try:
            sort = sig.sort(sname)
        except KeyError:
            raise NameResolutionError(f"unknown sort {sname!r}", line, col)
        per_sort[sort] = per_sort.get(sort, 0) + 1
        binding[vname] = Variable(sort, per_sort[sort])
    return binding


def _elab_expr(sig: Signature, binding: dict[str, Variable],
               raw: RawExpr) -> Expression:
    if isinstance(raw, RawName):
        if raw.name in binding:
            return Var(binding[raw.name])
        try:
            op = sig.operation(raw.name)
        except KeyError:
            raise NameResolutionError(f"unknown name {raw.name!r}",
                                      raw.line, raw.col)
        if op.inputs:
            raise DslSyntaxError(
                f"operation {raw.name!r} takes arguments", raw.line, raw.col)
        return App(op, ())
    try:
        op = sig.operation(raw.name)
    except KeyError:
        raise NameResolutionError(f"unknown operation {raw.name!r}",
                                  raw.line, raw.col)
    args = tuple(_elab_expr(sig, binding, a) for a in raw.args)
    try:
        return App(op, args)
    except TermcatError as exc:
        raise DslSyntaxError(str(exc), raw.line, raw.col)


def parse_spec(text: str) -> SpecFile:
    """Parse and resolve a .msl file; every name must resolve."""
    sort_names, op_decls, term_decls, eq_decls, proofs = _parse_raw(text)
    try:
        sig = validate_signature(sort_names, op_decls)
    except TermcatError as exc:
        raise DslSyntaxError(str(exc), 1, 1)

    sf = SpecFile(sig, sort_names, op_decls, term_decls, eq_decls, proofs)
    for td in term_decls:
        if td.name in sf.terms:
            raise NameResolutionError(f"term {td.name!r} declared twice", 1, 1)
        binding = _bind_bracket(sig, td.bracket, 0, 0)
        e = _elab_expr(sig, binding, td.expr)
        try:
            sf.terms[td.name] = make_term(e, binding.values(), e.sort)
        except TermcatError as exc:
            raise DslSyntaxError(str(exc), 1, 1)
    for ed in eq_decls:
        if ed.name in sf.equations:
            raise NameResolutionError(f"equation {ed.name!r} declared twice",
                                      1, 1)
        binding = _bind_bracket(sig, ed.bracket, 0, 0)
        left = _elab_expr(sig, binding, ed.left)
        right = _elab_expr(sig, binding, ed.right)
        try:
            sf.equations[ed.name] = make_equation(left, right,
                                                  binding.values())
        except TermcatError as exc:
            raise DslSyntaxError(str(exc), 1, 1)
        sf.eq_bindings[ed.name] = binding

    seen_proofs: set[str] = set()
    for proof in proofs:
        if proof.name in seen_proofs:
            raise NameResolutionError(
                f"proof {proof.name!r} declared twice", 1, 1)
        seen_proofs.add(proof.name)
        known: set[str] = set()
        for s in proof.steps:
            for h in ([s.eq_name] if s.rule == "hyp" else []):
                if h not in proof.hypotheses:
                    raise NameResolutionError(
                        f"step cites {h!r}, which is not among the proof's "
                        "hypotheses", s.line, s.col)
            for ref in s.steps:
                if ref not in known:
                    raise NameResolutionError(
                        f"step references unknown step {ref!r}",
                        s.line, s.col)
            known.add(s.name)
        for h in proof.hypotheses:
            if h not in sf.equations:
                raise NameResolutionError(
                    f"proof {proof.name!r} cites undefined equation {h!r}",
                    1, 1)
    return sf


# --- proofs to deduction trees -------------------------------------------------------


@dataclass
class _StepResult:
    tree: DeductionTree
    names: dict[str, Optional[Variable]]


def _merge_names(a: dict[str, Optional[Variable]],
                 b: dict[str, Optional[Variable]]):
    out = dict(a)
    for k, v in b.items():
        if k in out and out[k] != v:
            out[k] = None  # ambiguous
        else:
            out[k] = v
    return out


def _resolve_var(names: dict[str, Optional[Variable]], name: str,
                 step: StepDef) -> Variable:
    if name not in names:
        raise NameResolutionError(f"unknown variable {name!r}",
                                  step.line, step.col)
    v = names[name]
    if v is None:
        raise NameResolutionError(
            f"variable name {name!r} is ambiguous here", step.line, step.col)
    return v


def build_proof(sf: SpecFile, proof: ProofDef
                ) -> tuple[DeductionTree, list[Equation]]:
    """Turn a named proof into a deduction tree plus its hypothesis list.

    Conclusions are computed rule by rule; side-condition failures surface
    as deduction errors, not parse errors.
    """
    sig = sf.signature
    hypotheses = [sf.equations[h] for h in proof.hypotheses]
    results: dict[str, _StepResult] = {}
    last: _StepResult | None = None
    for s in proof.steps:
        try:
            res = _build_step(sf, sig, proof, hypotheses, results, s)
        except (DeductionError, DslSyntaxError, NameResolutionError):
            raise
        except TermcatError as exc:
            # a conclusion failed to form: the rule application is invalid
            raise SideConditionViolated(
                f"step {s.name!r}: {exc}") from exc
        results[s.name] = res
        last = res
    assert last is not None
    return last.tree, hypotheses


def _build_step(sf: SpecFile, sig: Signature, proof: ProofDef,
                hypotheses: list[Equation],
                results: dict[str, "_StepResult"],
                s: StepDef) -> "_StepResult":
    if s.rule == "hyp":
        idx = proof.hypotheses.index(s.eq_name)
        eq = hypotheses[idx]
        return _StepResult(DeductionTree(eq, Hypothesis(idx)),
                           dict(sf.eq_bindings[s.eq_name]))
    if s.rule == "refl":
        binding = _bind_bracket(sig, s.bracket or (), s.line, s.col)
        e = _elab_expr(sig, binding, s.expr)
        term = make_term(e, binding.values(), e.sort)
        eq = make_equation(e, e, term.vars)
        return _StepResult(DeductionTree(eq, Reflexivity(term)),
                           dict(binding))
    if s.rule == "sym":
        prem = results[s.steps[0]]
        eq = make_equation(prem.tree.conclusion.right,
                           prem.tree.conclusion.left,
                           prem.tree.conclusion.vars)
        return _StepResult(DeductionTree(eq, Symmetry(), (prem.tree,)),
                           dict(prem.names))
    if s.rule == "trans":
        p1, p2 = results[s.steps[0]], results[s.steps[1]]
        c1, c2 = p1.tree.conclusion, p2.tree.conclusion
        eq = make_equation(c1.left, c2.right, c1.vars)
        return _StepResult(
            DeductionTree(eq, Transitivity(), (p1.tree, p2.tree)),
            _merge_names(p1.names, p2.names))
    if s.rule == "conc":
        prem = results[s.steps[0]]
        x = _resolve_var(prem.names, s.var_name, s)
        c = prem.tree.conclusion
        eq = make_equation(c.left, c.right,
                           tuple(v for v in c.vars if v != x))
        return _StepResult(DeductionTree(eq, Concretion(x), (prem.tree,)),
                           dict(prem.names))
    if s.rule == "abs":
        prem = results[s.steps[0]]
        c = prem.tree.conclusion
        try:
            sort = sig.sort(s.sort_name)
        except KeyError:
            raise NameResolutionError(f"unknown sort {s.sort_name!r}",
                                      s.line, s.col)
        existing = prem.names.get(s.var_name)
        if existing is not None and existing.sort == sort \
                and existing not in c.vars:
            x = existing
        else:
            num = 1
            while Variable(sort, num) in c.vars:
                num += 1
            x = Variable(sort, num)
        eq = make_equation(c.left, c.right, c.vars + (x,))
        names = dict(prem.names)
        names[s.var_name] = x
        return _StepResult(DeductionTree(eq, Abstraction(x), (prem.tree,)),
                           names)
    if s.rule == "subst":
        p1, p2 = results[s.steps[0]], results[s.steps[1]]
        x = _resolve_var(p1.names, s.var_name, s)
        c1, c2 = p1.tree.conclusion, p2.tree.conclusion
        if x not in c1.vars:
            raise SideConditionViolated(
                f"{x} is not among the variables of step {s.steps[0]!r}")
        left = subst_expr(c1.left, x, c2.left)
        right = subst_expr(c1.right, x, c2.right)
        kept = tuple(v for v in c1.vars if v != x)
        eq = make_equation(left, right, ordered_vars(kept + c2.vars))
        return _StepResult(
            DeductionTree(eq, Substitutivity(x), (p1.tree, p2.tree)),
            _merge_names(p1.names, p2.names))
    raise NameResolutionError(f"unknown rule {s.rule!r}", s.line, s.col)


# --- printing --------------------------------------------------------------------


def _print_expr(e: RawExpr) -> str:
    if isinstance(e, RawName):
        return e.name
    return f"{e.name}({', '.join(_print_expr(a) for a in e.args)})"


def _print_bracket(bracket: Bracket) -> str:
    inner = ", ".join(f"{v}:{s}" for v, s in bracket)
    return f"[{inner}] " if bracket else ""


def print_spec(sf: SpecFile) -> str:
    """Canonical text for a parsed file; parsing it back gives an equal
    SpecFile."""
    lines: list[str] = []
    if sf.sort_names:
        lines.append("sort " + " ".join(sf.sort_names))
    for name, inputs, output in sf.op_decls:
        lines.append(f"op {name} : {' '.join(inputs)}"
                     f"{' ' if inputs else ''}-> {output}")
    for td in sf.term_decls:
        lines.append(f"term {td.name} {_print_bracket(td.bracket)}"
                     f": {_print_expr(td.expr)}")
    for ed in sf.eq_decls:
        lines.append(f"eq {ed.name} {_print_bracket(ed.bracket)}"
                     f": {_print_expr(ed.left)} = {_print_expr(ed.right)}")
    for proof in sf.proofs:
        header = f"proof {proof.name} from {' '.join(proof.hypotheses)}" \
            .rstrip()
        lines.append(header + " {")
        for s in proof.steps:
            if s.rule == "hyp":
                body = f"hyp {s.eq_name}"
            elif s.rule == "refl":
                body = f"refl {_print_bracket(s.bracket or ())}" \
                    f"{_print_expr(s.expr)}"
            elif s.rule == "sym":
                body = f"sym {s.steps[0]}"
            elif s.rule == "trans":
                body = f"trans {s.steps[0]} {s.steps[1]}"
            elif s.rule == "conc":
                body = f"conc {s.steps[0]} {s.var_name}"
            elif s.rule == "abs":
                body = f"abs {s.steps[0]} {s.var_name} : {s.sort_name}"
            else:
                body = f"subst {s.steps[0]} {s.var_name} {s.steps[1]}"
            lines.append(f"  {s.name} = {body} ;")
        lines.append("}")
    return "\n".join(lines) + "\n"
