"""Command-line front end.

    chowcalc decompose      --scenario S [--cycle NAME|EXPR]
    chowcalc diagonal       --scenario S
    chowcalc height-ff      --scenario S [--inject-fault]
    chowcalc semistable-sim --scenario S | --seed N
    chowcalc verify         [--scenario S|DIR|all]

``--scenario`` takes a path or the name of a bundled scenario.  Exit codes:
0 success, 1 domain error or failed check, 2 parse or usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import scenario as scn
from .classes import GradingError
from .context import ContextError
from .cyclelang import CycleSyntaxError, parse_cycle
from .cycles import PartialProductError, reduce
from .decompositions import DecompositionError, biprimitivity_test, decompose, ns0_basis, project_ns0
from .diagonal import PairingError, arithmetic_diagonal, hodge_lower_bound
from .heights import (HeightError, faulty_push_pair, height_unramified, k3_bound, satisfies_k3_bound)
from .semistable import ChartError, model_as_dict, random_configuration, render_model, run_schedule
from .verify import verify_scenario

OK, DOMAIN, PARSE = 0, 1, 2
DOMAIN_ERRORS = (ContextError, GradingError, DecompositionError, PairingError, PartialProductError,
                 HeightError, ChartError, ZeroDivisionError)


class Failure(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _load(target: str | None) -> scn.Scenario:
    if target is None:
        raise Failure("--scenario is required", PARSE)
    path = Path(target)
    if path.is_file():
        return scn.load(path)
    return scn.bundled_by_name(target)


def _geometry(sc: scn.Scenario):
    if sc.geometry is None:
        raise Failure(f"scenario {sc.name} has no geometry block", DOMAIN)
    bad = [r for r in sc.geometry.validate() if not r.ok]
    if bad:
        raise scn.ScenarioError("; ".join(f"{r.name}: {r.detail}" for r in bad), f"scenario {sc.name}")
    return sc.geometry


def _emit(args, text: str, data: dict) -> None:
    if args.format == "machine":
        print(json.dumps(data, indent=2, sort_keys=True))
    else:
        print(text)


# ---- subcommands -------------------------------------------------------------------

def cmd_decompose(args) -> int:
    sc = _load(args.scenario)
    ctx = _geometry(sc)
    text = sc.cycles.get(args.cycle, args.cycle)
    alpha = reduce(parse_cycle(text, ctx), ctx)
    rep = decompose(alpha, ctx)
    lines = [f"scenario: {sc.name}", f"cycle: {text}", rep.render(),
             f"complete: {'yes' if rep.is_complete(ctx) else 'no'}"]
    _emit(args, "\n".join(lines), {"scenario": sc.name, "cycle": text, **rep.as_dict(),
                                   "complete": rep.is_complete(ctx)})
    return OK


def cmd_diagonal(args) -> int:
    sc = _load(args.scenario)
    ctx = _geometry(sc)
    gamma = arithmetic_diagonal(ctx)
    result = biprimitivity_test(gamma, ctx)
    data = {"scenario": sc.name, "gamma": str(reduce(gamma, ctx, j2=True)), "biprimitive": result.passed,
            "tests": result.as_dict()}
    lines = [f"scenario: {sc.name}", f"gamma = {data['gamma']}"]
    lines += [f"  {k}: {v}" for k, v in result.as_dict().items()]
    lines.append(f"bi-primitive: {'yes' if result.passed else 'NO'}")
    if ctx.surface.h1_zero and ns0_basis(ctx):
        part = project_ns0(gamma, ctx).components
        data["ns0_projection"] = {k: str(v) for k, v in part.items()}
        lines.append(f"NS(S)_0 projection: {data['ns0_projection']}")
        bound = hodge_lower_bound(ctx)
        data["hodge_lower_bound"] = scn.format_rational(bound)
        lines.append(f"Hodge-index lower bound for <gamma, gamma>: {data['hodge_lower_bound']}")
    _emit(args, "\n".join(lines), data)
    return OK if result.passed else DOMAIN


def cmd_height_ff(args) -> int:
    sc = _load(args.scenario)
    if sc.arith is None:
        raise Failure(f"scenario {sc.name} has no arith block", DOMAIN)
    data = sc.arith
    res = height_unramified(data, rule=faulty_push_pair if args.inject_fault else None)
    fmt = scn.format_rational
    out = {"scenario": sc.name, "d": fmt(res.d), "kappa": fmt(res.kappa), "closed_form": fmt(res.closed_form),
           "reduced_route": fmt(res.reduced_route), "expansion_route": fmt(res.expansion_route), "agree": res.agree}
    lines = [f"scenario: {sc.name}", f"d = {out['d']}   kappa = {out['kappa']}",
             f"closed form      {out['closed_form']}", f"reduced route    {out['reduced_route']}",
             f"delta expansion  {out['expansion_route']}"]
    k3 = data.F_P == 0 and data.P_sq == 0 and data.genus >= 2 and data.omega_P % (2 * data.genus - 2) == 0
    if k3:
        h = data.omega_P / (2 * data.genus - 2)
        out["k3_h"] = fmt(h)
        out["k3_bound"] = fmt(k3_bound(data.genus, h))
        out["satisfies_bound"] = satisfies_k3_bound(data.genus, data.omega_sq, h)
        lines.append(f"K3 family: h = {out['k3_h']}, bound omega^2 <= {out['k3_bound']}: "
                     f"{'holds' if out['satisfies_bound'] else 'violated'}")
    if not res.agree:
        lines.append("consistency failure: the routes disagree")
    _emit(args, "\n".join(lines), out)
    return OK if res.agree else DOMAIN


def cmd_semistable(args) -> int:
    if args.seed is not None:
        curve, surf, schedule = random_configuration(args.seed)
        name = f"random seed {args.seed}"
    else:
        sc = _load(args.scenario)
        if sc.semistable is None:
            raise Failure(f"scenario {sc.name} has no semistable block", DOMAIN)
        curve, surf, schedule = sc.semistable.curve, sc.semistable.surface, sc.semistable.schedule
        name = sc.name
    model = run_schedule(curve, surf, schedule)
    _emit(args, f"configuration: {name}\n" + render_model(model), {"configuration": name, **model_as_dict(model)})
    return OK if model.semistable and model.traces_ok else DOMAIN


def cmd_verify(args) -> int:
    target = args.scenario or "all"
    if target == "all":
        paths = scn.bundled_paths()
    elif Path(target).is_dir():
        paths = sorted(Path(target).glob(f"*{scn.SUFFIX}"))
    else:
        paths = None
    scenarios = [_load(target)] if paths is None else [scn.load(p) for p in paths]
    if not scenarios:
        print("warning: no scenarios found; nothing to verify", file=sys.stderr)
        return OK
    matrix = {}
    lines = []
    for sc in scenarios:
        results = verify_scenario(sc)
        matrix[sc.name] = {r.name: r.ok for r in results}
        for r in results:
            mark = "PASS" if r.ok else "FAIL"
            detail = f"  ({r.detail})" if not r.ok and r.detail else ""
            lines.append(f"{mark}  {sc.name:28s} {r.name}{detail}")
    failed = sum(not ok for row in matrix.values() for ok in row.values())
    total = sum(len(row) for row in matrix.values())
    lines.append(f"{total - failed}/{total} checks passed")
    _emit(args, "\n".join(lines), {"results": matrix, "failed": failed})
    return OK if failed == 0 else DOMAIN


# ---- entry point -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chowcalc", description="Arithmetic diagonal cycle calculator")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scenario", help="scenario file or bundled scenario name")
        p.add_argument("--format", choices=("text", "machine"), default="text")

    p = sub.add_parser("decompose", help="split a cycle into its projector components")
    common(p)
    p.add_argument("--cycle", default="Gamma", help="named cycle of the scenario or a cycle expression")
    p.set_defaults(func=cmd_decompose)
    p = sub.add_parser("diagonal", help="arithmetic diagonal and bi-primitivity")
    common(p)
    p.set_defaults(func=cmd_diagonal)
    p = sub.add_parser("height-ff", help="unramified function-field height")
    common(p)
    p.add_argument("--inject-fault", action="store_true", help="corrupt a pushforward rule (test mode)")
    p.set_defaults(func=cmd_height_ff)
    p = sub.add_parser("semistable-sim", help="simulate the component blow-up schedule")
    common(p)
    p.add_argument("--seed", type=int, help="use a random configuration instead of a scenario")
    p.set_defaults(func=cmd_semistable)
    p = sub.add_parser("verify", help="run the invariant suite")
    common(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return PARSE if exc.code else OK
    try:
        return args.func(args)
    except Failure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (scn.ScenarioError, CycleSyntaxError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return PARSE
    except DOMAIN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DOMAIN


if __name__ == "__main__":
    sys.exit(main())
