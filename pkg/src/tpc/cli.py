"""Command-line interface: theory inspection, brute-force search, and the
synthesized decision procedures.

Exit codes: 0 success, 1 negative decision or nothing found, 2 usage
error, 3 synthesis gave up (NotLinearizable/Unsupported).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__, load_theory
from .errors import NotLinearizable, TpcError, Unsupported
from .inclusion import includes
from .oracle import SearchBudget, find_proof, reachable_set
from .pipeline import pipeline
from .schemes import build_scheme, parse_scheme, print_scheme
from .sigma import sigma
from .terms import (
    check_proof,
    parse_term,
    parse_theory,
    print_term,
    print_theory,
)

SCHEMA = "tpc/1"

log = logging.getLogger("tpc")


def _theory(spec: str):
    path = Path(spec)
    if path.exists():
        return parse_theory(path.read_text())
    try:
        return load_theory(spec)
    except FileNotFoundError:
        raise TpcError(f"no such theory file or bundled theory: {spec}") from None


def _budget(args) -> SearchBudget:
    depth = args.max_depth if args.max_depth is not None else getattr(args, "depth", None)
    if depth is None:
        depth = 8
    return SearchBudget(max_depth=depth, max_tree_size=args.max_tree_size)


def _emit(args, payload: dict, human: str) -> None:
    if args.json:
        payload = {"schema": SCHEMA, "version": __version__, **payload}
        print(json.dumps(payload, indent=2))
    else:
        print(human)


def _charfn_dump(fn):
    return {
        "scheme": print_scheme(fn.scheme),
        "branches": [
            {
                "decls": [{"name": d.name, "kind": d.kind} for d in b.decls],
                "atoms": [str(a) for a in b.atoms.conjuncts],
            }
            for b in fn.branches
        ],
    }


def _trace_dump(trace):
    return {
        "start": print_scheme(trace.start),
        "result": print_scheme(trace.result),
        "steps": [
            {"rule": s.rule, "before": print_scheme(s.before), "after": print_scheme(s.after)}
            for s in trace.steps
        ],
        "attempts": [
            {"rule": a.rule, "target": print_scheme(a.target), "query": a.query, "reason": a.reason}
            for a in trace.attempts
        ],
    }


def _cmd_parse(args) -> int:
    th = _theory(args.file)
    _emit(args, {"theory": print_theory(th)}, print_theory(th))
    return 0


def _cmd_oracle(args) -> int:
    th = _theory(args.file)
    budget = _budget(args)
    if args.dump:
        trees = [print_term(t) for t in reachable_set(th, th.start, budget)]
        _emit(args, {"reachable": trees}, "\n".join(trees))
        return 0
    goal = parse_term(args.goal) if args.goal else th.goal
    if goal is None:
        raise TpcError("theory has no goal; pass --goal TERM or use --dump")
    proof = find_proof(th, goal, budget)
    if proof is None:
        _emit(args, {"proof": None}, "no proof found within budget")
        return 1
    check_proof(th, proof)
    _emit(args, {"proof": list(proof.steps)}, ".".join(proof.steps))
    return 0


def _make_procedure(args, th):
    return pipeline(th, selfcheck=not args.no_selfcheck)


def _cmd_prove(args) -> int:
    th = _theory(args.file)
    goal = parse_term(args.goal) if args.goal else th.goal
    if goal is None:
        raise TpcError("theory has no goal; pass --goal TERM")
    if args.method == "oracle":
        proof = find_proof(th, goal, _budget(args))
    else:
        try:
            proof = _make_procedure(args, th).prove(goal)
        except (NotLinearizable, Unsupported):
            if args.method == "generated":
                raise
            log.info("synthesis failed, falling back to oracle search")
            proof = find_proof(th, goal, _budget(args))
    if proof is None:
        _emit(args, {"proof": None}, "no proof")
        return 1
    check_proof(th, proof)
    _emit(args, {"proof": list(proof.steps)}, ".".join(proof.steps) or "eps")
    return 0


def _cmd_decide(args) -> int:
    th = _theory(args.file)
    t = parse_term(getattr(args, "from"))
    d = parse_term(args.to)
    if args.method == "oracle":
        from .oracle import decide_oracle

        verdict = decide_oracle(th, t, d, _budget(args))
    else:
        try:
            verdict = _make_procedure(args, th).decide(d, t)
        except (NotLinearizable, Unsupported):
            if args.method == "generated":
                raise
            log.info("synthesis failed, falling back to oracle search")
            from .oracle import decide_oracle

            verdict = decide_oracle(th, t, d, _budget(args))
    _emit(args, {"decision": verdict}, "true" if verdict else "false")
    return 0 if verdict else 1


def _cmd_sigma(args) -> int:
    th = _theory(args.file)
    fn = sigma(th, parse_scheme(args.scheme))
    _emit(args, {"charfn": _charfn_dump(fn)}, str(fn))
    return 0


def _cmd_includes(args) -> int:
    th = _theory(args.file)
    left = sigma(th, parse_scheme(args.left))
    right = sigma(th, parse_scheme(args.right))
    res = includes(left, right)
    payload = {
        "system": [str(c) for c in res.system.conditions],
        "existentials": list(res.system.existentials),
        "region": {"kind": res.region.kind, "conditions": [str(c) for c in res.region.conditions]},
    }
    _emit(args, payload, f"region: {res.region}")
    return 0


def _cmd_reduce(args) -> int:
    from .delta import order_axioms, reduce_scheme

    th = _theory(args.file)
    if args.scheme:
        scheme = parse_scheme(args.scheme)
    else:
        scheme = build_scheme(order_axioms(th))
    reduced, trace = reduce_scheme(th, scheme)
    human = [f"reduced: {print_scheme(reduced)}"]
    human += [f"  {s}" for s in trace.steps]
    human += [f"  blocked: {a}" for a in trace.attempts]
    _emit(args, {"trace": _trace_dump(trace)}, "\n".join(human))
    return 0


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="tpc",
        description="Membership deciders for truncated-predicate-calculus theories.",
    )
    p.add_argument("--json", action="store_true", help="structured JSON output")
    p.add_argument("--seed", type=int, default=None, help="seed for randomized checks")
    p.add_argument("--max-depth", type=int, default=None, help="proof search depth bound")
    p.add_argument("--max-tree-size", type=int, default=512, help="tree size bound for search")
    p.add_argument("--no-selfcheck", action="store_true", help="skip the oracle self-check")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("parse", help="parse and reprint a theory")
    sp.add_argument("file")
    sp.set_defaults(func=_cmd_parse)

    sp = sub.add_parser("oracle", help="brute-force proof search")
    sp.add_argument("file")
    sp.add_argument("--goal", default=None)
    sp.add_argument("--depth", type=int, default=None)
    sp.add_argument("--dump", action="store_true", help="list reachable sentences")
    sp.set_defaults(func=_cmd_oracle)

    sp = sub.add_parser("prove", help="produce a replayable proof of the goal")
    sp.add_argument("file")
    sp.add_argument("--goal", default=None)
    sp.add_argument("--method", choices=["oracle", "generated", "auto"], default="auto")
    sp.set_defaults(func=_cmd_prove)

    sp = sub.add_parser("decide", help="decide reachability between two sentences")
    sp.add_argument("file")
    sp.add_argument("--from", required=True)
    sp.add_argument("--to", required=True)
    sp.add_argument("--method", choices=["oracle", "generated", "auto"], default="auto")
    sp.set_defaults(func=_cmd_decide)

    sp = sub.add_parser("sigma", help="synthesize a characteristic function")
    sp.add_argument("file")
    sp.add_argument("--scheme", required=True)
    sp.set_defaults(func=_cmd_sigma)

    sp = sub.add_parser("includes", help="inclusion region between two schemes")
    sp.add_argument("file")
    sp.add_argument("--left", required=True)
    sp.add_argument("--right", required=True)
    sp.set_defaults(func=_cmd_includes)

    sp = sub.add_parser("reduce", help="reduce a scheme, with trace")
    sp.add_argument("file")
    sp.add_argument("--scheme", default=None)
    sp.set_defaults(func=_cmd_reduce)
    return p


def main(argv=None) -> int:
    level = os.environ.get("TPC_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))
    args = _parser().parse_args(argv)
    if args.seed is not None:
        import random

        random.seed(args.seed)
    try:
        return args.func(args)
    except (NotLinearizable, Unsupported) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except TpcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
