"""The invariant suite run by ``chowcalc verify``.

Each scenario yields a list of named pass/fail results.  Expectations
recorded in a scenario's ``expect`` block are checked as well.
"""

from __future__ import annotations

from .context import InvariantResult
from .cycles import graph, reduce
from .decompositions import NS0_PART, biprimitivity_test, decompose, ns0_basis, project_ch, project_ns0
from .diagonal import arithmetic_diagonal, ns0_projection_of_gamma
from .heights import HeightError, height_unramified
from .scenario import Scenario, parse_rational
from .semistable import run_schedule


def _run(name, fn) -> InvariantResult:
    try:
        ok, detail = fn()
    except (ArithmeticError, ValueError) as exc:
        return InvariantResult(name, False, f"{type(exc).__name__}: {exc}")
    return InvariantResult(name, bool(ok), detail)


def geometry_checks(sc: Scenario) -> list[InvariantResult]:
    ctx = sc.geometry
    out = [InvariantResult(f"context:{r.name}", r.ok, r.detail) for r in ctx.validate()]
    if not all(r.ok for r in out) or ctx.morphism is None:
        return out

    def gamma():
        return arithmetic_diagonal(ctx)

    def biprimitive():
        res = biprimitivity_test(gamma(), ctx)
        return res.passed, "" if res.passed else str(res.as_dict())

    def decomposition():
        rep = decompose(graph(), ctx)
        ok = rep.is_complete(ctx) and not rep.overlaps
        return ok, "" if ok else f"overlaps {rep.overlaps}"

    def idempotent():
        once = project_ch(graph(), 2, ctx)
        for name, comp in once.components.items():
            again = project_ch(comp, 2, ctx, check=False).components.get(name)
            if not reduce(again - comp, ctx).is_zero():
                return False, f"component {name} is not fixed"
        return True, ""

    out.append(_run("diagonal:biprimitive", biprimitive))
    out.append(_run("decompose:graph_complete", decomposition))
    out.append(_run("project_ch:idempotent", idempotent))
    if ctx.surface.h1_zero and ns0_basis(ctx):
        def ns0():
            part = project_ns0(gamma(), ctx).components[NS0_PART]
            ok = reduce(part - ns0_projection_of_gamma(ctx), ctx, j2=True).is_zero()
            return ok, "" if ok else f"{part} != {ns0_projection_of_gamma(ctx)}"
        out.append(_run("diagonal:ns0_projection", ns0))
    if "gamma_zero" in sc.expect:
        want = sc.expect["gamma_zero"] == "true"
        out.append(_run("expect:gamma_zero", lambda: (gamma().is_zero() == want, str(gamma()))))
    return out


def arith_checks(sc: Scenario) -> list[InvariantResult]:
    data = sc.arith
    refuse = sc.expect.get("height_refused")
    if refuse is not None:
        def refused():
            try:
                height_unramified(data)
            except HeightError as exc:
                return True, str(exc)
            return False, "no refusal"
        return [_run("arith:refuses", refused)]

    def routes():
        res = height_unramified(data)
        return res.agree, f"closed form {res.closed_form}, reduced {res.reduced_route}, expansion {res.expansion_route}"

    out = [_run("arith:routes_agree", routes)]
    if "height" in sc.expect:
        want = parse_rational(sc.expect["height"], "expect.height")
        out.append(_run("expect:height", lambda: (height_unramified(data).value == want,
                                                  str(height_unramified(data).value))))
    return out


def semistable_checks(sc: Scenario) -> list[InvariantResult]:
    block = sc.semistable

    def model():
        return run_schedule(block.curve, block.surface, block.schedule)

    return [
        _run("semistable:final_charts", lambda: (model().semistable, "")),
        _run("semistable:component_traces", lambda: (model().traces_ok, "")),
    ]


def verify_scenario(sc: Scenario) -> list[InvariantResult]:
    out = []
    if sc.geometry is not None:
        out += geometry_checks(sc)
    if sc.arith is not None:
        out += arith_checks(sc)
    if sc.semistable is not None:
        out += semistable_checks(sc)
    return out

