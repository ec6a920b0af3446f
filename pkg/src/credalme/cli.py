"""Command-line interface.

Exit codes: 0 success, 1 invalid network, 2 infeasible constraints,
3 size cap exceeded, 4 undefined conditional probability, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from typing import Sequence

import numpy as np

from . import fixtures
from .geometry import InfeasibleError
from .imap import build_gkb, ci_gap, separates, verify_imap
from .inference import Query, UndefinedConditionalError, cond_prob, credal_bounds, joint_of_bn
from .model import (
    CapExceededError,
    CredalNetwork,
    JointTable,
    NetworkFormatError,
    load_network,
    network_kb,
    network_to_json,
    validate,
)
from .sequential import (
    NetworkInvalidError,
    global_me_model,
    select_sequential,
    select_sequential_direct,
)
from .solvers import SolverConfig, SolverError

EXIT_INVALID = 1
EXIT_INFEASIBLE = 2
EXIT_CAP = 3
EXIT_UNDEFINED = 4
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(x: float) -> str:
    """12 significant digits, printed in shortest round-trip form."""
    return repr(float(f"{float(x):.12g}"))


def _round_json(obj):
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, list):
        return [_round_json(x) for x in obj]
    if isinstance(obj, dict):
        return {k: _round_json(v) for k, v in obj.items()}
    return obj


def render_rounded(net: CredalNetwork) -> str:
    doc = _round_json(network_to_json(net))
    parts = []
    for key in ("variables", "edges", "tables"):
        rows = [json.dumps(x, ensure_ascii=False) for x in doc[key]]
        body = ("[\n  " + ",\n  ".join(rows) + "\n ]") if rows else "[]"
        parts.append(f' "{key}": {body}')
    return "{\n" + ",\n".join(parts) + "\n}\n"


def joint_dump(joint: JointTable) -> str:
    rows = [
        json.dumps({"assignment": a, "p": float(fmt(p))}, ensure_ascii=False)
        for a, p in joint.entries()
    ]
    return "[\n " + ",\n ".join(rows) + "\n]\n"


def emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(out))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".json")
    with os.fdopen(fd, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, out)


def _config(args) -> SolverConfig:
    return SolverConfig(args.bisection_tol, args.convex_tol, args.max_iters)


def _load(path: str) -> CredalNetwork:
    net = load_network(path)
    report = validate(net)
    if not report.ok:
        raise NetworkInvalidError(report)
    return net


def _query(args) -> Query:
    try:
        return Query.parse(args.target, args.given)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _check_query_names(net: CredalNetwork, q: Query) -> None:
    for ev in (q.target, q.evidence):
        for name, value in ev.items:
            if name not in net.names:
                raise UsageError(f"unknown variable {name!r} in query")
            if value not in net.variable(name).domain:
                raise UsageError(f"unknown value {value!r} for {name!r} in query")


def _seq_query(net: CredalNetwork, q: Query, config: SolverConfig) -> float:
    bn = select_sequential(net, config).bayes_net
    sub = bn.subnetwork(bn.ancestors(q.variables))
    return cond_prob(joint_of_bn(sub), q)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_validate(args) -> int:
    net = load_network(args.file)
    report = validate(net)
    print(report)
    return 0 if report.ok else EXIT_INVALID


def cmd_select(args) -> int:
    net = _load(args.file)
    result = select_sequential(net, _config(args))
    emit(render_rounded(result.bayes_net), args.out)
    return 0


def cmd_query(args) -> int:
    net = _load(args.file)
    q = _query(args)
    _check_query_names(net, q)
    config = _config(args)
    mode = getattr(args, "mode", "seq")
    if mode == "bounds":
        b = credal_bounds(net, q)
        print(f"[{fmt(b.lo)}, {fmt(b.hi)}]")
    elif mode == "global":
        print(fmt(cond_prob(global_me_model(net, config), q)))
    else:
        print(fmt(_seq_query(net, q, config)))
    return 0


def cmd_bounds(args) -> int:
    args.mode = "bounds"
    return cmd_query(args)


def cmd_global(args) -> int:
    net = _load(args.file)
    emit(joint_dump(global_me_model(net, _config(args))), args.out)
    return 0


def cmd_direct(args) -> int:
    net = _load(args.file)
    order = [s.strip() for s in args.order.split(",")] if args.order else None
    try:
        joint = select_sequential_direct(net, order, _config(args))
    except ValueError as exc:
        if isinstance(exc, (NetworkFormatError, NetworkInvalidError)):
            raise
        raise UsageError(str(exc)) from None
    emit(joint_dump(joint), args.out)
    return 0


def _names(text: str | None) -> list[str]:
    return [s.strip() for s in text.split(",") if s.strip()] if text else []


def cmd_imap(args) -> int:
    net = _load(args.file)
    kb = network_kb(net)
    joint = global_me_model(net, _config(args))
    X, Y, Z = _names(args.x), _names(args.y), _names(args.z)
    if X or Y:
        if not X or not Y:
            raise UsageError("--x and --y must both be given")
        for n in X + Y + Z:
            if n not in net.names:
                raise UsageError(f"unknown variable {n!r}")
        try:
            sep = separates(build_gkb(kb, net.names), X, Y, Z)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        gap = ci_gap(joint, X, Y, Z, args.tol)
        print(f"separated: {str(sep).lower()}")
        print(f"independent: {str(gap <= args.tol).lower()} (max gap {fmt(gap)})")
        return 0
    print(verify_imap(kb, joint, trials=args.trials, tol=args.tol).to_json())
    return 0


def _demo_example52(config: SolverConfig) -> bool:
    net = fixtures.example52()
    expected = {
        ("A", "true"): (0.5, 0.5),
        ("C", "A=a1"): (0.4, 0.6),
        ("C", "A=a2"): (0.5, 0.5),
        ("F", "C=c1"): (0.7, 0.15, 0.15),
        ("F", "C=c2"): (0.6, 0.2, 0.2),
    }
    ok = True
    bn = select_sequential(net, config).bayes_net
    print("table         expected            computed")
    for t in bn.tables:
        key = (t.child, str(t.given))
        if key not in expected:
            continue
        exp = expected[key]
        good = np.allclose(t.body.p, exp, atol=1e-9)
        ok &= good
        got = ", ".join(fmt(x) for x in t.body.p)
        print(f"{t.child}|{str(t.given):<6}  {str(exp):<18}  ({got})  {'ok' if good else 'MISMATCH'}")
    q = Query.parse("F=f1", "A=a1")
    p = cond_prob(joint_of_bn(bn), q)
    b = credal_bounds(net, q)
    for label, exp, got in (("Pr(F=f1|A=a1)", 0.64, p), ("lower", 0.63, b.lo), ("upper", 0.84, b.hi)):
        good = abs(got - exp) <= 1e-9
        ok &= good
        print(f"{label:<14} expected {exp}  computed {fmt(got)}  {'ok' if good else 'MISMATCH'}")
    return ok


def _demo_burglary(config: SolverConfig) -> bool:
    q = Query.parse("B=b", "A=a")
    ok = True
    print("u,f_closed_form,global_me,sequential_me")
    for u in np.round(np.arange(0.05, 0.951, 0.05), 2):
        net = fixtures.burglary(float(u))
        g = cond_prob(global_me_model(net, config), q)
        s = cond_prob(joint_of_bn(select_sequential(net, config).bayes_net), q)
        f = fixtures.fall_off_curve(float(u))
        ok &= abs(g - f) <= 1e-4 and abs(s - 0.5) <= 1e-9
        print(f"{fmt(u)},{fmt(f)},{fmt(g)},{fmt(s)}")
    return ok


def cmd_demo(args) -> int:
    config = _config(args)
    ok = _demo_example52(config) if args.name == "example52" else _demo_burglary(config)
    return 0 if ok else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--bisection-tol", type=float, default=SolverConfig.bisection_tol)
    common.add_argument("--convex-tol", type=float, default=SolverConfig.convex_tol)
    common.add_argument("--max-iters", type=int, default=SolverConfig.max_iters)

    p = _Parser(prog="credalme", description="Sequential maximum entropy for credal networks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("validate", parents=[common], help="check a network file")
    s.add_argument("file")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("select", parents=[common], help="sequential ME point network")
    s.add_argument("file")
    s.add_argument("--out")
    s.set_defaults(func=cmd_select)

    for name, func in (("query", cmd_query), ("bounds", cmd_bounds)):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("file")
        s.add_argument("--target", required=True)
        s.add_argument("--given", default="true")
        if name == "query":
            s.add_argument("--mode", choices=("seq", "bounds", "global"), default="seq")
        s.set_defaults(func=func)

    s = sub.add_parser("global-me", parents=[common], help="global ME joint table")
    s.add_argument("file")
    s.add_argument("--out")
    s.set_defaults(func=cmd_global)

    s = sub.add_parser("direct", parents=[common], help="sequential ME joint, step by step")
    s.add_argument("file")
    s.add_argument("--order")
    s.add_argument("--out")
    s.set_defaults(func=cmd_direct)

    s = sub.add_parser("imap", parents=[common], help="separation and independence checks")
    s.add_argument("file")
    s.add_argument("--x")
    s.add_argument("--y")
    s.add_argument("--z")
    s.add_argument("--tol", type=float, default=1e-5)
    s.add_argument("--trials", type=int, default=500)
    s.set_defaults(func=cmd_imap)

    s = sub.add_parser("demo", parents=[common], help="run a bundled example")
    s.add_argument("name", choices=("burglary", "example52"))
    s.set_defaults(func=cmd_demo)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NetworkFormatError, NetworkInvalidError) as exc:
        print(f"invalid network: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (InfeasibleError, SolverError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except CapExceededError as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except UndefinedConditionalError as exc:
        print(f"undefined: {exc}", file=sys.stderr)
        return EXIT_UNDEFINED
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
