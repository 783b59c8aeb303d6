"""Command-line surface.

Commands: sketch, compile, check-eq, subst, check-proof, normalize-proof,
oracle.  Human-readable text by default; `--json` switches to a stable JSON
schema (identical inputs give byte-identical output).  Exit codes: 0 on
success, 1 on verification failure, 2 on input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import arrows, deduction, models, sketch
from .dsl import SpecFile, build_proof, parse_spec
from .errors import DeductionError, TermcatError
from .signature import Variable
from .subst import SubstInstance, subst_arrow_direct, subst_term
from .terms import Expression, Term, Var


# --- JSON encoding -----------------------------------------------------------


def object_json(obj: arrows.FPObject) -> dict:
    if isinstance(obj, arrows.Leaf):
        return {"kind": "sort", "name": obj.sort.name}
    return {"kind": "product", "factors": [object_json(f)
                                           for f in obj.factors]}


def arrow_json(a: arrows.FPArrow) -> dict:
    if isinstance(a, arrows.Id):
        return {"kind": "id", "object": object_json(a.obj)}
    if isinstance(a, arrows.Proj):
        return {"kind": "proj", "index": a.index,
                "source": object_json(a.src)}
    if isinstance(a, arrows.Gen):
        return {"kind": "gen", "op": a.op.name}
    if isinstance(a, arrows.TupleArrow):
        return {"kind": "tuple", "source": object_json(a.src),
                "parts": [arrow_json(p) for p in a.parts]}
    return {"kind": "comp", "after": arrow_json(a.after),
            "before": arrow_json(a.before)}


def normal_body_json(b: arrows.NormalBody) -> dict:
    if isinstance(b, arrows.Path):
        return {"kind": "path", "steps": list(b.steps)}
    if isinstance(b, arrows.GenApp):
        return {"kind": "gen", "op": b.op.name,
                "args": [normal_body_json(a) for a in b.args]}
    return {"kind": "tuple", "parts": [normal_body_json(p)
                                       for p in b.parts]}


def normal_json(n: arrows.NormalArrow) -> dict:
    return {"dom": object_json(n.src), "cod": object_json(n.dst),
            "body": normal_body_json(n.body)}


def variable_json(v: Variable) -> dict:
    return {"sort": v.sort.name, "num": v.num}


def expr_json(e: Expression) -> dict:
    if isinstance(e, Var):
        return {"kind": "var", "var": variable_json(e.var)}
    return {"kind": "app", "op": e.op.name,
            "args": [expr_json(a) for a in e.args]}


def equation_json(eq) -> dict:
    return {"left": expr_json(eq.left), "right": expr_json(eq.right),
            "vars": [variable_json(v) for v in eq.vars],
            "sort": eq.sort.name}


def term_json(t: Term) -> dict:
    return {"expr": expr_json(t.expr),
            "vars": [variable_json(v) for v in t.vars],
            "sort": t.sort.name}


def constraint_json(c: deduction.EqConstraint) -> dict:
    return {"left": arrow_json(c.left), "right": arrow_json(c.right)}


def kernel_step_json(s: deduction.KernelStep) -> dict:
    if isinstance(s, deduction.CiteHyp):
        return {"step": "cite", "hyp": s.hyp}
    if isinstance(s, deduction.Refl):
        return {"step": "refl", "arrow": arrow_json(s.arrow)}
    if isinstance(s, deduction.Sym):
        return {"step": "sym", "of": s.of}
    if isinstance(s, deduction.Trans):
        return {"step": "trans", "first": s.first, "second": s.second}
    if isinstance(s, deduction.ComposeLeft):
        return {"step": "compose-left", "arrow": arrow_json(s.arrow),
                "of": s.of}
    if isinstance(s, deduction.ComposeRight):
        return {"step": "compose-right", "arrow": arrow_json(s.arrow),
                "of": s.of}
    return {"step": "tuple", "source": object_json(s.src),
            "of": list(s.of)}


def factorization_json(f: deduction.Factorization) -> dict:
    return {
        "hypotheses": [constraint_json(c) for c in f.hyp],
        "claims": [constraint_json(c) for c in f.claim],
        "workspace": [constraint_json(c) for c in f.wksp],
        "verification": [[kernel_step_json(s) for s in proof]
                         for proof in f.verif],
        "meta": f.meta,
    }


def levelled_json(ld: deduction.LevelledDeduction) -> dict:
    return {"levels": [[{
        "equation": equation_json(s.equation),
        "rule": deduction.RULE_NAMES[type(s.rule)],
        "premises": list(s.premises),
    } for s in level] for level in ld.levels]}


def _emit(payload: dict) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


# --- commands -------------------------------------------------------------------


def _load(path: str) -> SpecFile:
    return parse_spec(Path(path).read_text(encoding="utf-8"))


def cmd_sketch(args) -> int:
    sf = _load(args.file)
    sk = sketch.sketch_of_signature(sf.signature)
    if args.json:
        _emit({"nodes": [str(n) for n in sk.nodes],
               "arrows": [str(a) for a in sk.arrows],
               "cones": [{"vertex": str(c.vertex),
                          "legs": [str(l) for l in c.legs]}
                         for c in sk.cones]})
        return 0
    print("nodes:")
    for n in sk.nodes:
        print(f"  {n}")
    print("arrows:")
    for a in sk.arrows:
        print(f"  {a}")
    print("cones:")
    for c in sk.cones:
        legs = ", ".join(str(l) for l in c.legs) or "(none)"
        print(f"  vertex {c.vertex}: {legs}")
    return 0


def _stages(t: Term):
    occ = arrows.occurrence_arrow(t)
    reg = arrows.regroup_arrow(t.expr)
    app = arrows.apply_arrow(t.expr)
    return occ, reg, app


def cmd_compile(args) -> int:
    sf = _load(args.file)
    if args.term not in sf.terms:
        print(f"error: unknown term {args.term!r}", file=sys.stderr)
        return 2
    t = sf.terms[args.term]
    occ, reg, app = _stages(t)
    normal = arrows.normalize(arrows.term_arrow(t))
    if args.json:
        _emit({"term": term_json(t),
               "input_product": object_json(arrows.input_product(t)),
               "occurrences": arrow_json(occ),
               "regroup": arrow_json(reg),
               "apply": arrow_json(app),
               "normal": normal_json(normal)})
        return 0
    print(f"term {args.term} : {t}")
    print(f"  input product: {arrows.input_product(t)}")
    print(f"  occurrences:   {occ} : -> {arrows.cod(occ)}")
    print(f"  regroup:       {reg} : -> {arrows.cod(reg)}")
    print(f"  apply:         {app} : -> {arrows.cod(app)}")
    print(f"  normal form:   {normal}")
    return 0


def cmd_check_eq(args) -> int:
    sf = _load(args.file)
    if args.equation not in sf.equations:
        print(f"error: unknown equation {args.equation!r}", file=sys.stderr)
        return 2
    eq = sf.equations[args.equation]
    left, right = arrows.equation_arrows(eq)
    equal = arrows.arrows_equal(left, right)
    if args.json:
        _emit({"equation": equation_json(eq),
               "left": normal_json(arrows.normalize(left)),
               "right": normal_json(arrows.normalize(right)),
               "formally_equal": equal})
    else:
        print(f"equation {args.equation}: {eq}")
        print(f"  left arrow:  {arrows.normalize(left)}")
        print(f"  right arrow: {arrows.normalize(right)}")
        print(f"  formally equal: {'yes' if equal else 'no'}")
    return 0 if equal else 1


def cmd_subst(args) -> int:
    sf = _load(args.file)
    for name in (args.term, args.with_term):
        if name not in sf.terms:
            print(f"error: unknown term {name!r}", file=sys.stderr)
            return 2
    target = sf.terms[args.term]
    replacement = sf.terms[args.with_term]
    # resolve --var by its name in the term's declaration bracket, or by
    # the canonical rendering "x<num>:<sort>"
    from .dsl import _bind_bracket
    decl = next(d for d in sf.term_decls if d.name == args.term)
    binding = _bind_bracket(sf.signature, decl.bracket, 0, 0)
    if args.var in binding:
        var = binding[args.var]
    else:
        by_render = {str(v): v for v in target.vars}
        if args.var not in by_render:
            print(f"error: {args.var!r} does not name a variable of "
                  f"{args.term!r}", file=sys.stderr)
            return 2
        var = by_render[args.var]
    inst = SubstInstance(target, var, replacement)
    rec = subst_term(inst)
    rec_arrow = arrows.term_arrow(rec)
    direct = subst_arrow_direct(inst)
    equal = arrows.arrows_equal(rec_arrow, direct)
    if args.json:
        _emit({"target": term_json(target), "var": variable_json(var),
               "replacement": term_json(replacement),
               "recursive": {"term": term_json(rec),
                             "normal": normal_json(arrows.normalize(rec_arrow))},
               "direct": {"normal": normal_json(arrows.normalize(direct))},
               "arrows_equal": equal})
    else:
        print(f"substituting {args.with_term} for {var} in {args.term}")
        print(f"  recursive route: {rec}")
        print(f"    arrow: {arrows.normalize(rec_arrow)}")
        print(f"  direct route arrow: {arrows.normalize(direct)}")
        print(f"  arrows equal: {'yes' if equal else 'no'}")
    return 0 if equal else 1


def _check_one_proof(sf: SpecFile, name: str) -> tuple[int, dict, list[str]]:
    """Check one proof; returns (exit code, json payload, text lines)."""
    proof = sf.proof(name)
    try:
        tree, hyps = build_proof(sf, proof)
        ld = deduction.normalize_deduction(tree)
        cert = deduction.compile_to_factorization(sf.signature, ld, hyps)
        result = deduction.verify_factorization(cert)
    except DeductionError as exc:
        return 1, {"proof": name, "valid": False, "error": str(exc)}, \
            [f"proof {name}: INVALID ({exc})"]
    code = 0 if result.ok else 1
    payload = {"proof": name,
               "conclusion": equation_json(tree.conclusion),
               "valid": result.ok,
               "certificate": factorization_json(cert),
               "trace": list(result.trace)}
    lines = [f"proof {name}: "
             f"{'VALID' if result.ok else 'FAILED VERIFICATION'}",
             f"  conclusion: {tree.conclusion}",
             f"  hypotheses: {len(cert.hyp)}, claims: {len(cert.claim)}, "
             f"workspace: {len(cert.wksp)}"]
    lines.extend(f"  {line}" for line in result.trace)
    return code, payload, lines


def cmd_check_proof(args) -> int:
    sf = _load(args.file)
    if args.proof and not any(p.name == args.proof for p in sf.proofs):
        print(f"error: unknown proof {args.proof!r}", file=sys.stderr)
        return 2
    names = [args.proof] if args.proof else [p.name for p in sf.proofs]
    worst = 0
    payloads = []
    for name in names:
        code, payload, lines = _check_one_proof(sf, name)
        payloads.append(payload)
        if not args.json:
            print("\n".join(lines))
        worst = max(worst, code)
    if args.json:
        _emit(payloads[0] if args.proof else {"proofs": payloads})
    return worst


def cmd_normalize_proof(args) -> int:
    sf = _load(args.file)
    if not any(p.name == args.proof for p in sf.proofs):
        print(f"error: unknown proof {args.proof!r}", file=sys.stderr)
        return 2
    tree, _ = build_proof(sf, sf.proof(args.proof))
    ld = deduction.normalize_deduction(tree)
    if args.json:
        _emit({"proof": args.proof, **levelled_json(ld)})
        return 0
    print(f"proof {args.proof} in levelled form:")
    for l, level in enumerate(ld.levels):
        print(f"  level {l}:")
        for i, s in enumerate(level):
            prem = ", ".join(str(p) for p in s.premises)
            rule = deduction.RULE_NAMES[type(s.rule)]
            print(f"    [{i}] {s.equation}   ({rule}"
                  f"{' from ' + prem if prem else ''})")
    return 0


def cmd_oracle(args) -> int:
    sf = _load(args.file)
    if args.equation not in sf.equations:
        print(f"error: unknown equation {args.equation!r}", file=sys.stderr)
        return 2
    eq = sf.equations[args.equation]
    found = models.find_counterexample(sf.signature, eq, args.max_size)
    checked = sum(1 for _ in models.enumerate_models(sf.signature,
                                                     args.max_size))
    if args.json:
        payload = {"equation": equation_json(eq),
                   "max_size": args.max_size,
                   "models_checked": checked,
                   "holds": found is None}
        if found is not None:
            model, env = found
            payload["counterexample"] = {
                "model": model.describe(),
                "assignment": {str(v): val for v, val in
                               sorted(env.items(),
                                      key=lambda kv: kv[0].key())}}
        _emit(payload)
    else:
        print(f"equation {args.equation}: {eq}")
        if found is None:
            print(f"  holds in all {checked} models with carriers <= "
                  f"{args.max_size}")
        else:
            model, env = found
            print("  counterexample found:")
            print(f"    carriers: {model.describe()['carriers']}")
            for op, table in model.describe()["tables"].items():
                print(f"    {op}: {table}")
            assign = ", ".join(f"{v} = {val}" for v, val in
                               sorted(env.items(),
                                      key=lambda kv: kv[0].key()))
            print(f"    assignment: {assign}")
    return 0 if found is None else 1


# --- entry point -------------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="termcat",
        description="Compile multisorted equational logic into "
                    "finite-product categorical combinators and check "
                    "deductions as arrow-equality certificates.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **flags):
        p = sub.add_parser(name)
        for flag, kw in flags.items():
            p.add_argument(flag, **kw)
        p.add_argument("file", help=".msl input file")
        p.add_argument("--json", action="store_true",
                       help="emit stable JSON instead of text")
        p.set_defaults(fn=fn)
        return p

    add("sketch", cmd_sketch)
    add("compile", cmd_compile, **{"--term": dict(required=True)})
    add("check-eq", cmd_check_eq, **{"--equation": dict(required=True)})
    p = add("subst", cmd_subst, **{"--term": dict(required=True),
                                   "--var": dict(required=True)})
    p.add_argument("--with", dest="with_term", required=True,
                   help="name of the replacement term")
    add("check-proof", cmd_check_proof, **{"--proof": dict(default=None)})
    add("normalize-proof", cmd_normalize_proof,
        **{"--proof": dict(required=True)})
    p = add("oracle", cmd_oracle, **{"--equation": dict(required=True)})
    p.add_argument("--max-size", type=int, default=2,
                   help="carrier size bound (default 2)")
    return parser


def run(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.fn(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DeductionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except TermcatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
