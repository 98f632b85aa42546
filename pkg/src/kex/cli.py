"""Command-line front end.

Exit codes: 0 = solved and feasible (or check passed), 1 = solved and
infeasible (or check failed), 2 = input error, 3 = algorithm precondition
or capacity error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .approx3 import solve_approx3
from .colorcoding import solve_colorcoding
from .core import Chain, Cycle, Exchange, Instance, exchange_value, validate_exchange
from .errors import CapacityError, KexError, ModelError, ParseError, PreconditionError
from .generator import gen_random
from .kernel import kernelize
from .oracle import solve_exact
from .result import SolveResult
from .serialize import parse_instance, parse_result, write_instance, write_result
from .treedecomp import TreeDecomposition
from .twsolver import solve_treewidth
from .typesolver import solve_types

EXIT_FEASIBLE = 0
EXIT_INFEASIBLE = 1
EXIT_INPUT = 2
EXIT_PRECONDITION = 3


def _read(path: str) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def _write(path: str | None, data: bytes) -> None:
    if path is None:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        with open(path, "wb") as fh:
            fh.write(data)


def _load_td(path: str) -> TreeDecomposition:
    try:
        doc = json.loads(_read(path))
        bags = [frozenset(b) for b in doc["bags"]]
        edges = [(int(i), int(j)) for i, j in doc["edges"]]
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise ParseError(f"malformed tree decomposition document: {exc}") from exc
    return TreeDecomposition(bags, edges)


def _dispatch(instance: Instance, args: argparse.Namespace) -> SolveResult:
    if args.algorithm == "brute":
        return solve_exact(instance, cap=args.cap)
    if args.algorithm == "color":
        return solve_colorcoding(instance, trials=args.trials, seed=args.seed)
    if args.algorithm == "types":
        return solve_types(instance, cap=args.cap)
    if args.algorithm == "tw":
        td = _load_td(args.td) if args.td else None
        return solve_treewidth(instance, td=td, cap=args.cap)
    if args.algorithm == "approx3":
        return solve_approx3(instance, mode=args.packing, swap_width=args.swap, cap=args.cap)
    raise PreconditionError(f"unknown algorithm {args.algorithm!r}")


def _cmd_solve(args: argparse.Namespace) -> int:
    instance = parse_instance(_read(args.instance))
    result: SolveResult
    if args.kernelize:
        reduced, report = kernelize(instance)
        result = _dispatch(reduced, args)
        if result.exchange is not None:
            back = {new: old for old, new in report.kept.items()}
            result.exchange = Exchange(
                tuple(Chain(tuple(back[v] for v in c.vertices)) for c in result.exchange.chains),
                tuple(Cycle(tuple(back[v] for v in c.vertices)) for c in result.exchange.cycles),
            )
            if validate_exchange(instance, result.exchange):
                raise ModelError("kernel-mapped certificate failed validation")
        result.stats["kernel_removed"] = len(report.removed)
    else:
        result = _dispatch(instance, args)
    _write(args.output, write_result(result))
    return EXIT_FEASIBLE if result.feasible else EXIT_INFEASIBLE


def _cmd_kernelize(args: argparse.Namespace) -> int:
    instance = parse_instance(_read(args.instance))
    reduced, _report = kernelize(instance)
    _write(args.output, write_instance(reduced))
    return EXIT_FEASIBLE


def _cmd_check(args: argparse.Namespace) -> int:
    instance = parse_instance(_read(args.instance))
    solution = parse_result(_read(args.solution))
    problems: list[str] = []
    if solution.exchange is not None:
        problems.extend(validate_exchange(instance, solution.exchange))
        if not problems and exchange_value(solution.exchange) != solution.value:
            problems.append(
                f"declared value {solution.value} != certificate value "
                f"{exchange_value(solution.exchange)}"
            )
    if solution.feasible:
        if solution.exchange is None:
            problems.append("feasible result carries no certificate")
        elif solution.value < instance.t:
            problems.append(f"feasible result covers {solution.value} < t={instance.t}")
    elif solution.value >= instance.t and solution.exchange is not None and not problems:
        problems.append("result claims infeasible but certificate covers the target")
    if problems:
        for p in problems:
            print(p, file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_FEASIBLE


def _cmd_gen(args: argparse.Namespace) -> int:
    graph = gen_random(args.n, args.m, args.b, args.seed)
    instance = Instance(graph, args.lp, args.lc, args.t)
    _write(args.output, write_instance(instance))
    return EXIT_FEASIBLE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kex", description="Kidney-exchange clearing solvers")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve an instance")
    solve.add_argument("-i", "--instance", required=True)
    solve.add_argument("-a", "--algorithm", required=True,
                       choices=["brute", "color", "types", "tw", "approx3"])
    solve.add_argument("--kernelize", action="store_true")
    solve.add_argument("--trials", type=int, default=None)
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--cap", type=int, default=10**6)
    solve.add_argument("--td", default=None, help="tree decomposition JSON (bags + tree edges)")
    solve.add_argument("--packing", choices=["exact", "local"], default="exact")
    solve.add_argument("--swap", type=int, default=2)
    solve.add_argument("-o", "--output", default=None)
    solve.set_defaults(func=_cmd_solve)

    kern = sub.add_parser("kernelize", help="apply the reduction rule")
    kern.add_argument("-i", "--instance", required=True)
    kern.add_argument("-o", "--output", default=None)
    kern.set_defaults(func=_cmd_kernelize)

    check = sub.add_parser("check", help="verify a solution document")
    check.add_argument("-i", "--instance", required=True)
    check.add_argument("-s", "--solution", required=True)
    check.set_defaults(func=_cmd_check)

    gen = sub.add_parser("gen", help="generate a seeded random instance")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--m", type=int, required=True)
    gen.add_argument("--b", type=int, required=True)
    gen.add_argument("--lp", type=int, required=True)
    gen.add_argument("--lc", type=int, required=True)
    gen.add_argument("--t", type=int, required=True)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("-o", "--output", default=None)
    gen.set_defaults(func=_cmd_gen)
    return parser


def run_cli(argv: list[str]) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ModelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (PreconditionError, CapacityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except KexError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
