"""Acceptance criteria, one test (and one printed PASS/FAIL line) per criterion.

The lines are repeated in the pytest terminal summary; executing this file
directly prints a plain report.
"""

import dataclasses
import random
import sys
import time
from fractions import Fraction

import sympy as sp

from chowcalc import corpus
from chowcalc import scenario as scn
from chowcalc.classes import curve_divisor, surface_divisor
from chowcalc.cycles import reduce, tensor
from chowcalc.decompositions import (NS0_PART, biprimitivity_test, decompose, ns0_basis, project_A, project_ch,
                                     project_ns0, retract_biprimitive)
from chowcalc.diagonal import arithmetic_diagonal, height_difference, height_pairing, optimal_e
from chowcalc.heights import ArithSurfaceData, height_unramified, k3_bound
from chowcalc.semistable import blowup_chart, case_table, component_valuation, fuzz, is_strictly_semistable

from support import contexts, projector_failure, random_cycle, rational


LINES = []


def report(n, ok, detail=""):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}".rstrip()
    LINES.append(line)
    print(line)
    return ok


# ---- criteria -----------------------------------------------------------------------

def criterion_1():
    rng = random.Random(71)
    start = time.perf_counter()
    count = bad = 0
    while count < 250:
        data = ArithSurfaceData(rng.randint(0, 8), rational(rng, 30, 7), rational(rng, 30, 7),
                                rational(rng, 30, 7), rational(rng, 8, 3))
        if data.d == 0:
            continue
        count += 1
        res = height_unramified(data)
        bad += not (res.closed_form == res.expansion_route == res.reduced_route)
    elapsed = time.perf_counter() - start
    return report(1, bad == 0 and elapsed < 5, f"{count} instances, {bad} disagreements, {elapsed:.2f}s")


def criterion_2():
    h, w2 = sp.symbols("h w2")
    bad = []
    for g in range(2, 11):
        value = sp.expand(height_unramified(ArithSurfaceData.k3(g, w2, h)).value)
        ok = (value.coeff(w2) == sp.Rational(-(2 * g - 1), 2 * g - 2) and value.coeff(h) == 2 * g
              and sp.expand(value - value.coeff(w2) * w2 - value.coeff(h) * h) == 0
              and sp.expand(k3_bound(g, h) - sp.Rational(4 * g * (g - 1), 2 * g - 1) * h) == 0)
        if not ok:
            bad.append(g)
    return report(2, not bad, f"g = 2..10, failures {bad}")


def criterion_3():
    a11, a12, a22 = sp.symbols("a11 a12 a22")
    gram = [[a11, a12], [a12, a22]]
    bad = []
    for a, b in [(1, 1), (2, 3), (5, 2)]:
        ctx = corpus.p1xp1_curve(a, b)
        gamma = arithmetic_diagonal(ctx)
        alpha = ctx.f_pull(surface_divisor({"H1": a})) - ctx.f_pull(surface_divisor({"H2": b}))
        want = sp.expand(sp.Rational(1, 2 * a * b) * ctx.nt_pair(alpha, alpha, gram))
        height_ok = sp.expand(height_pairing(gamma, gamma, ctx, nt_gram=gram) - want) == 0
        h2 = surface_divisor({"H1": a, "H2": -b})
        expected = tensor(ctx.f_pull(h2), h2) / ctx.ns_pair(h2, h2)
        part = project_ns0(gamma, ctx).components[NS0_PART]
        proj_ok = ctx.ns_pair(h2, h2) == -2 * a * b and reduce(part - expected, ctx, j2=True).is_zero()
        if not (height_ok and proj_ok):
            bad.append((a, b))
    return report(3, not bad, f"(1,1), (2,3), (5,2), failures {bad}")


def criterion_4():
    rng = random.Random(4)
    bad = 0
    for _ in range(60):
        n = rng.randint(1, 8)
        ctx = corpus.plane_curve(n, pic0_of_pullback=(rng.randint(-5, 5), rng.randint(-5, 5)))
        c = Fraction(rng.randint(1, 12), rng.randint(1, 12))
        ctx = dataclasses.replace(ctx, surface=dataclasses.replace(ctx.surface, xi=surface_divisor({"H": c})))
        bad += not arithmetic_diagonal(ctx.normalized()).is_zero()
    return report(4, bad == 0, f"60 random (n, xi = cH), {bad} nonzero")


def criterion_5():
    scenarios = [sc for sc in scn.bundled() if sc.geometry is not None and sc.geometry.morphism is not None]
    bad = [sc.name for sc in scenarios if not biprimitivity_test(arithmetic_diagonal(sc.geometry), sc.geometry).passed]
    triple = any(sc.geometry.graph_mu is not None for sc in scenarios)
    ok = not bad and len(scenarios) >= 10 and triple
    return report(5, ok, f"{len(scenarios)} scenarios (triple product included: {triple}), failures {bad}")


def criterion_6():
    ctxs = contexts()
    names = sorted(ctxs)
    rng = random.Random(6)
    start = time.perf_counter()
    failures = []
    count = 0
    for k in range(105):
        name = names[k % len(names)]
        ctx = ctxs[name]
        x = random_cycle(rng, ctx, terms=3)
        count += 1
        checks = [
            ("A", lambda y: project_A(y, 2, ctx, check=False), x, False),
            ("ch", lambda y: project_ch(y, 2, ctx, check=False), x, False),
            ("retraction", lambda y: decompose(y, ctx, check=False), x, False),
        ]
        if ctx.surface.h1_zero and ns0_basis(ctx):
            checks.append(("ns0", lambda y: project_ns0(y, ctx, check=False), retract_biprimitive(x, ctx), True))
        for label, project, arg, j2 in checks:
            msg = projector_failure(project, arg, ctx, j2)
            if msg:
                failures.append((name, label, msg))
    elapsed = time.perf_counter() - start
    return report(6, not failures and elapsed < 5, f"{count} inputs, {len(failures)} failures, {elapsed:.2f}s")


def criterion_7():
    rng = random.Random(77)
    ctx = corpus.plane_curve(4)
    bad = {"d=0": 0, "e0": 0, "cocycle": 0, "sign": 0}
    for _ in range(150):
        a = abs(rational(rng)) + 1
        b = rational(rng)
        gram = [[a, b], [b, b * b / a + abs(rational(rng)) + Fraction(1, 3)]]
        d = rational(rng)
        phi = curve_divisor(d, {"p1": rational(rng), "p2": rational(rng)})
        es = [curve_divisor(1, {"p1": rational(rng), "p2": rational(rng)}) for _ in range(3)]

        def off(u, v, ph=phi, dd=d):
            return height_difference(u, v, ph, dd, ctx, nt_gram=gram)

        flat = curve_divisor(0, {"p1": rational(rng), "p2": rational(rng)})
        bad["d=0"] += off(es[0], es[1], flat, 0) != -2 * ctx.nt_pair(flat, es[0] - es[1], gram)
        bad["cocycle"] += off(es[0], es[2]) != off(es[0], es[1]) + off(es[1], es[2])
        if d == 0:
            continue
        e0 = optimal_e(phi, d)
        v = es[0] - e0
        vv = ctx.nt_pair(v, v, gram)
        offset = off(e0, es[0])
        bad["e0"] += offset != -d * vv
        sign = (offset > 0) - (offset < 0)
        bad["sign"] += sign != (-1 if d > 0 else 1) * ((vv > 0) - (vv < 0))
    return report(7, not any(bad.values()), f"150 random inputs, failures {bad}")


def criterion_8():
    start = time.perf_counter()
    results = fuzz(range(60), max_curve=4, max_surface=5)
    elapsed = time.perf_counter() - start
    ok = all(r.semistable and r.traces_ok for r in results)
    deep = sum(r.shape[2] > 0 for r in results)
    return report(8, ok and elapsed < 30, f"60 seeds ({deep} with deep points), {elapsed:.2f}s")


def criterion_9():
    rows = {r.kind: r for r in case_table()}
    matched = all(all(r.matches) for r in rows.values())
    survivors = [s for r in rows.values() for s in r.survivors]
    once = bool(rows["triple"].resolving_centers) and all(
        all(is_strictly_semistable(x) for x in blowup_chart(s, component_valuation(*rows["triple"].resolving_centers[0])))
        for s in survivors)
    ok = matched and len(survivors) == 1 and once
    return report(9, ok, f"4 outcomes matched: {matched}, survivors {len(survivors)}, "
                         f"resolved by one blow-up: {once}")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7,
            criterion_8, criterion_9]


def test_criterion_1_two_routes():
    assert criterion_1()


def test_criterion_2_k3_family():
    assert criterion_2()


def test_criterion_3_p1xp1():
    assert criterion_3()


def test_criterion_4_p2_vanishing():
    assert criterion_4()


def test_criterion_5_biprimitivity():
    assert criterion_5()


def test_criterion_6_projectors():
    assert criterion_6()


def test_criterion_7_height_calculus():
    assert criterion_7()


def test_criterion_8_semistable_fuzz():
    assert criterion_8()


def test_criterion_9_case_table():
    assert criterion_9()


if __name__ == "__main__":
    results = [fn() for fn in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria pass")
    sys.exit(0 if all(results) else 1)
