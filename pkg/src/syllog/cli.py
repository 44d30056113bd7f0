"""Command-line entry point.

Exit codes: 0 analysis done, 10 SAT, 20 UNSAT, 30 UNKNOWN, 1 failed check
(``s5 --check valid`` on an invalid formula, failing selftest), 2 usage
error, 3 input error, 4 resource cap reached.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

from .decider import SAT, UNKNOWN, UNSAT, decide_sat, decide_sat_h
from .encodings import KINDS, SIGNATURES, EncodingRequest
from .formulas import FormulaError, Variable, conjuncts, parse, parse_document, render, render_document
from .normalizer import ResourceLimitError, make_conjunction, normalize
from .relativizer import PreconditionError, RelConfig, bound_terms, build_d_star, relativize
from .restriction import is_3lqsr
from .semantics import Interpretation

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3, 4
EXIT_STATUS = {SAT: 10, UNSAT: 20, UNKNOWN: 30}

ENV_PREFIX = "SYLLOG_"


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    inputs: list = field(default_factory=list)
    max_domain: int | None = None
    max_disjuncts: int | None = None
    json_path: str | None = None
    seed: int = 0
    threads: int = 1
    outputs: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("max_domain", "max_disjuncts"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise InputError(f"--{name.replace('_', '-')} must be positive")


def _env(name, default=None, conv=int):
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None or raw == "":
        return default
    try:
        return conv(raw)
    except ValueError:
        raise InputError(f"bad value for {ENV_PREFIX}{name}: {raw!r}") from None


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _write(path: str, text: str):
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as e:
        raise InputError(f"cannot write {path}: {e.strerror}") from None


def dump_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _emit_json(cfg: RunConfig, doc):
    if cfg.json_path:
        _write(cfg.json_path, dump_json(doc))


def _load_formula(path):
    return parse_document(_read(path))


def _load_interp(path) -> Interpretation:
    try:
        return Interpretation.from_json(json.loads(_read(path)))
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON: {e}") from None


# ---------------------------------------------------------------------------
# commands

def cmd_solve(cfg: RunConfig, args) -> int:
    f, _ = _load_formula(cfg.inputs[0])
    if cfg.command == "solve-h":
        v = decide_sat_h(f, args.h, max_domain=cfg.max_domain, method=args.method or "ground",
                         threads=cfg.threads)
    else:
        v = decide_sat(f, max_domain=cfg.max_domain, max_disjuncts=cfg.max_disjuncts,
                       threads=cfg.threads, allow_unrestricted=args.allow_unrestricted,
                       method=args.method or "search")
    print(v.status)
    print(f"bound used: {v.bound_used}")
    if v.witness is not None:
        print("witness: " + json.dumps(v.witness.to_json(), sort_keys=True))
    if args.witness and v.witness is not None:
        _write(args.witness, dump_json(v.witness.to_json()))
    _emit_json(cfg, v.to_json())
    return EXIT_STATUS[v.status]


def cmd_check_restriction(cfg: RunConfig, args) -> int:
    f, _ = _load_formula(cfg.inputs[0])
    rep = is_3lqsr(f)
    for e in rep.entries:
        print(f"{e.verdict}: {render(e.link.inner_atom)} under {render(e.outer_atom)}")
    if not rep.entries:
        print("no level-1 quantified atoms inside level-2 quantified atoms")
    print("member" if rep.member else "not a member")
    _emit_json(cfg, rep.to_json())
    return EXIT_OK


def cmd_normalize(cfg: RunConfig, args) -> int:
    f, _ = _load_formula(cfg.inputs[0])
    conjs = normalize(f, max_disjuncts=cfg.max_disjuncts)
    texts = [render_document(c.formula()) for c in conjs]
    if args.out:
        _write(args.out, "".join(texts))
    for i, t in enumerate(texts, 1):
        print(f"# disjunct {i}")
        print(t, end="")
    _emit_json(cfg, {"conjunctions": [c.to_json() for c in conjs]})
    return EXIT_OK


def cmd_relativize(cfg: RunConfig, args) -> int:
    f, _ = _load_formula(cfg.inputs[0])
    M = _load_interp(cfg.inputs[1])
    try:
        psi = make_conjunction(conjuncts(f))
    except FormulaError as e:
        raise InputError(f"relativize needs a normalized conjunction: {e}") from None
    ds = build_d_star(M, psi)
    Ms, index = relativize(M, ds.elements, RelConfig(frozenset(psi.inventory.free1), args.d_star))
    print("D* = {" + ", ".join(map(str, ds.elements)) + "}")
    for u in ds.elements:
        print(f"  {u}: " + ", ".join(p.kind for p in ds.provenance[u]))
    print("relativized: " + json.dumps(Ms.to_json(), sort_keys=True))
    if args.out:
        _write(args.out, dump_json(Ms.to_json()))
    _emit_json(cfg, {"domain_witness_set": ds.to_json(), "interpretation": Ms.to_json(),
                     "index": {str(u): i for u, i in sorted(index.items())}})
    return EXIT_OK


def cmd_bound(cfg: RunConfig, args) -> int:
    f, _ = _load_formula(cfg.inputs[0])
    conjs = normalize(f, max_disjuncts=cfg.max_disjuncts)
    rows = []
    for i, c in enumerate(conjs, 1):
        t = bound_terms(c)
        rows.append(t)
        print(f"disjunct {i}: |W0|={t['w0']} |W1|={t['w1']} |Phi|={t['phi']} "
              f"max_m={t['max_m']} max_n={t['max_n']} bound={t['bound']}")
    _emit_json(cfg, {"disjuncts": rows})
    return EXIT_OK


def _encoding_args(kind: str, names: list) -> tuple:
    if kind in SIGNATURES:
        sig = SIGNATURES[kind]
    elif kind in ("singleton1",):
        sig = SIGNATURES["3lssp-singleton1"]
    elif kind in ("singleton2", "powerset"):
        sig = SIGNATURES["3lssp-" + kind]
    elif kind in ("pow-le-h", "pow-lt-h", "pow-eq-h"):
        sig = (2, 1)
    elif kind == "set-former":
        sig = (1, 0)
    else:
        if len(names) < 2:
            raise InputError(f"{kind} takes a collection and at least one set")
        sig = (2,) + (1,) * (len(names) - 1)
    if len(names) != len(sig):
        raise InputError(f"{kind} takes {len(sig)} variable names, got {len(names)}")
    return tuple(Variable(n, s) for n, s in zip(names, sig))


def cmd_encode(cfg: RunConfig, args) -> int:
    names = [n for n in (args.vars or "").replace(",", " ").split() if n]
    if not names:
        names = _default_names(args.kind)
    vs = _encoding_args(args.kind, names)
    if args.kind == "set-former":
        if not args.body:
            raise InputError("set-former needs --body")
        vs = vs + (parse(args.body),)
    req = EncodingRequest(args.kind, vs, args.h, {"verbatim": args.verbatim})
    f = req.build()
    text = render_document(f)
    if args.out:
        _write(args.out, text)
    print(text, end="")
    rep = is_3lqsr(f)
    _emit_json(cfg, {"kind": args.kind, "formula": render(f), "restriction": rep.to_json()})
    return EXIT_OK


def _default_names(kind):
    if kind in ("cartesian", "cartesian-transversal", "pow-star"):
        return ["A", "X1", "X2"]
    if kind == "set-former":
        return ["X", "z"]
    sig = SIGNATURES.get(kind) or SIGNATURES.get("3lssp-" + kind) or (2, 1)
    pools = {0: iter(["x", "y", "z"]), 1: iter(["X", "Y", "Z"]), 2: iter(["A", "B", "C"])}
    return [next(pools[s]) for s in sig]


def cmd_s5(cfg: RunConfig, args) -> int:
    from .s5 import MNot, ModalParseError, SATISFIABLE, UNSATISFIABLE, decide_s5, parse_modal, translate_s5

    try:
        phi = parse_modal(_read(cfg.inputs[0]))
    except ModalParseError as e:
        raise InputError(str(e)) from None
    side = not args.no_side
    if args.emit_translation:
        bundle = translate_s5(phi, side)
        _write(args.emit_translation, render_document(bundle.formula()))
    target = MNot(phi) if args.check == "valid" else phi
    status, v = decide_s5(target, include_side=side, method=args.method, max_domain=cfg.max_domain)
    doc = {"check": args.check, "status": status, "verdict": v.to_json()}
    if args.check == "valid":
        answer = {UNSATISFIABLE: "valid", SATISFIABLE: "invalid"}.get(status, "unknown")
        doc["answer"] = answer
        print(answer)
        code = {"valid": EXIT_OK, "invalid": EXIT_FAIL}.get(answer, EXIT_STATUS[UNKNOWN])
    else:
        print(status)
        code = EXIT_STATUS[{SATISFIABLE: SAT, UNSATISFIABLE: UNSAT}.get(status, UNKNOWN)]
    _emit_json(cfg, doc)
    return code


def cmd_selftest(cfg: RunConfig, args) -> int:
    from .selftest import SUITES, run_suites

    names = args.suite or list(SUITES)
    bad = [n for n in names if n not in SUITES]
    if bad:
        raise InputError(f"unknown suite(s): {', '.join(bad)}; choose from {', '.join(SUITES)}")
    results = run_suites(seed=cfg.seed, budget=args.budget, names=names)
    for r in results:
        print(f"{'PASS' if r.ok else 'FAIL'} {r.name}: {r.cases} cases, {r.failures} failures")
    _emit_json(cfg, {"seed": cfg.seed, "budget": args.budget, "suites": [r.to_json() for r in results]})
    return EXIT_OK if all(r.ok for r in results) else EXIT_FAIL


COMMANDS = {
    "solve": cmd_solve, "solve-h": cmd_solve, "check-restriction": cmd_check_restriction,
    "normalize": cmd_normalize, "relativize": cmd_relativize, "bound": cmd_bound,
    "encode": cmd_encode, "s5": cmd_s5, "selftest": cmd_selftest,
}


# ---------------------------------------------------------------------------
# parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


class _UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--max-domain", type=int, default=_env("MAX_DOMAIN"),
                        help="largest domain size tried by the deciders")
    common.add_argument("--max-disjuncts", type=int, default=_env("MAX_DISJUNCTS"),
                        help="abort normalization beyond this many disjuncts")
    common.add_argument("--json", dest="json_path", metavar="PATH", default=_env("JSON", conv=str),
                        help="write the machine-readable result here")
    common.add_argument("--seed", type=int, default=_env("SEED", 0))
    common.add_argument("--threads", type=int, default=_env("THREADS", 1),
                        help="worker processes for disjunct search (0 = one per CPU)")

    p = _Parser(prog="syllog", description="Satisfiability for three-level quantified syllogistic.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name in ("solve", "solve-h"):
        s = sub.add_parser(name, parents=[common], help="decide satisfiability of a .3lqs formula")
        s.add_argument("file")
        s.add_argument("--witness", metavar="PATH", help="write the model found")
        s.add_argument("--method", choices=["search", "ground"] if name == "solve" else ["ground", "branch"])
        if name == "solve":
            s.add_argument("--allow-unrestricted", action="store_true",
                           help="accept formulas outside the fragment (SAT answers only)")
        else:
            s.add_argument("--h", type=int, required=True, help="bound on quantifier prefixes")

    s = sub.add_parser("check-restriction", parents=[common], help="audit the quantifier restriction")
    s.add_argument("file")
    s = sub.add_parser("normalize", parents=[common], help="print normalized conjunctions")
    s.add_argument("file")
    s.add_argument("--out", metavar="PATH")
    s = sub.add_parser("relativize", parents=[common], help="build D* and the relativized model")
    s.add_argument("file")
    s.add_argument("interpretation")
    s.add_argument("--d-star", type=int, default=None, help="element receiving out-of-range individuals")
    s.add_argument("--out", metavar="PATH")
    s = sub.add_parser("bound", parents=[common], help="small-model bound per disjunct")
    s.add_argument("file")
    s = sub.add_parser("encode", parents=[common], help="emit a set-construct encoding")
    s.add_argument("--kind", required=True, choices=KINDS)
    s.add_argument("--vars", help="comma-separated variable names (sorts follow the kind)")
    s.add_argument("--h", type=int)
    s.add_argument("--body", help="membership condition for set-former")
    s.add_argument("--verbatim", action="store_true", help="literal reading of the pow-h display")
    s.add_argument("--out", metavar="PATH")
    s = sub.add_parser("s5", parents=[common], help="decide an S5 formula via its translation")
    s.add_argument("file")
    s.add_argument("--check", choices=["sat", "valid"], default="sat")
    s.add_argument("--emit-translation", metavar="PATH")
    s.add_argument("--no-side", action="store_true", help="omit the universe and accessibility conjuncts")
    s.add_argument("--method", choices=["ground", "search"], default="ground")
    s = sub.add_parser("selftest", parents=[common], help="run the randomized property suites")
    s.add_argument("--budget", type=int, default=_env("BUDGET", 200), help="cases per suite")
    s.add_argument("--suite", action="append", help="run only this suite (repeatable)")
    return p


def main(argv=None) -> int:
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        inputs = [getattr(args, k) for k in ("file", "interpretation") if getattr(args, k, None)]
        cfg = RunConfig(args.command, inputs, args.max_domain, args.max_disjuncts,
                        args.json_path, args.seed, args.threads)
        return COMMANDS[args.command](cfg, args)
    except SystemExit as e:  # --help
        return e.code if isinstance(e.code, int) else EXIT_OK
    except _UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    except (InputError, FormulaError, PreconditionError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceLimitError as e:
        print(f"resource limit: {e}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
