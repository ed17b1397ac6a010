"""Builders for the bundled example geometries.

Each builder returns a :class:`GeometryContext`; :mod:`chowcalc.scenario`
wraps them into scenario files.  Pic^0 data (Neron-Tate Gram, the Pic^0 parts
of pulled-back divisors) is free input, so the builders take it as arguments
with fixed defaults.
"""

from __future__ import annotations

from fractions import Fraction

from .classes import POINT, curve_divisor, surface_divisor, surface_point
from .context import CurveData, GeometryContext, MorphismData, OpaqueRule, SurfaceData
from .linalg import Q

DEFAULT_NT = ((Q(2), Q(1)), (Q(1), Q(3)))


def _gens(r: int) -> tuple[str, ...]:
    return tuple(f"p{i + 1}" for i in range(r))


def _nt(r: int, nt=None):
    if nt is not None:
        return tuple(tuple(Q(x) for x in row) for row in nt)
    return tuple(row[:r] for row in DEFAULT_NT[:r])


def _vec(gens, values):
    return {g: Q(v) for g, v in zip(gens, values)}


def plane_curve(n: int, pic0_of_pullback=(1, -2), nt=None) -> GeometryContext:
    """A smooth plane curve of degree n in P^2, xi = H/n."""
    genus = (n - 1) * (n - 2) // 2
    gens = _gens(min(genus, 2))
    curve = CurveData(genus=genus, pic0=gens, nt_gram=_nt(len(gens), nt))
    surface = SurfaceData(
        ns=("H",), ns_gram=((Q(1),),), xi=surface_divisor({"H": Fraction(1, n)}),
        h1_zero=True, chow_trivial=True,
    )
    morphism = MorphismData(
        push_fundamental=surface_divisor({"H": n}),
        push_point=surface_point(1),
        pull_ns={"H": curve_divisor(n, _vec(gens, pic0_of_pullback))},
    )
    return GeometryContext(curve, surface, morphism).check()


def p1xp1_curve(a: int, b: int, u1=(1, 0), u2=(2, -1), nt=None) -> GeometryContext:
    """A curve of class a H1 + b H2 on P^1 x P^1 with xi = [C]/[C]^2.

    ``u1`` and ``u2`` are the Pic^0 parts of f^*H1 and f^*H2.
    """
    genus = (a - 1) * (b - 1)
    gens = _gens(min(genus, 2))
    curve = CurveData(genus=genus, pic0=gens, nt_gram=_nt(len(gens), nt))
    c2 = 2 * a * b
    surface = SurfaceData(
        ns=("H1", "H2"), ns_gram=((Q(0), Q(1)), (Q(1), Q(0))),
        xi=surface_divisor({"H1": Fraction(a, c2), "H2": Fraction(b, c2)}),
        h1_zero=True, chow_trivial=True,
        classes={"h1": surface_divisor({"H1": a, "H2": b}), "h2": surface_divisor({"H1": a, "H2": -b})},
    )
    morphism = MorphismData(
        push_fundamental=surface_divisor({"H1": a, "H2": b}),
        push_point=surface_point(1),
        pull_ns={"H1": curve_divisor(b, _vec(gens, u1)), "H2": curve_divisor(a, _vec(gens, u2))},
    )
    return GeometryContext(curve, surface, morphism).check()


def triple_product(genus: int, s=Fraction(1, 2), t=Fraction(1, 2), v_e=(0, 0), v_k=(1, 1),
                   nt=None) -> GeometryContext:
    """The diagonal C -> C x C with xi = s (e x C) + t (C x e).

    The reference point of C is o; e = o + v_e and K_C = (2g-2) o + v_K.  The
    reference point of S is (o, o).  Pic^0(S) is generated by pr_1^* and pr_2^*
    of the curve generators (``w1_k``, ``w2_k``), Alb(S) by the two
    pushforwards (``a1_k``, ``a2_k``).
    """
    s, t = Q(s), Q(t)
    gens = _gens(2)
    ve, vk = _vec(gens, v_e), _vec(gens, v_k)
    e = curve_divisor(1, ve)
    canonical = curve_divisor(2 * genus - 2, vk)
    curve = CurveData(genus=genus, pic0=gens, nt_gram=_nt(2, nt),
                      classes={"e": e, "K": canonical})

    w = {i: {g: f"w{i}_{g}" for g in gens} for i in (1, 2)}
    a = {i: {g: f"a{i}_{g}" for g in gens} for i in (1, 2)}

    def alb_pair(vec1, vec2, degree=0):
        coeffs = {}
        for g in gens:
            coeffs[a[1][g]] = vec1.get(g, 0)
            coeffs[a[2][g]] = vec2.get(g, 0)
        return surface_point(degree, coeffs)

    neg_k = {g: -x for g, x in vk.items()}
    ns_gram = ((Q(0), Q(1), Q(1)), (Q(1), Q(0), Q(1)), (Q(1), Q(1), Q(2 - 2 * genus)))
    ns_alb = {
        ("F1", "F2"): alb_pair(ve, ve),
        ("D", "F1"): alb_pair(ve, ve),
        ("D", "F2"): alb_pair(ve, ve),
        ("D", "D"): alb_pair(neg_k, neg_k),
    }
    ns_pic0_alb = {"F1": {}, "F2": {}, "D": {}}
    for g in gens:
        unit = {g: 1}
        ns_pic0_alb["F1"][w[2][g]] = alb_pair({}, unit)
        ns_pic0_alb["F2"][w[1][g]] = alb_pair(unit, {})
        ns_pic0_alb["D"][w[1][g]] = alb_pair(unit, unit)
        ns_pic0_alb["D"][w[2][g]] = alb_pair(unit, unit)
    surface = SurfaceData(
        ns=("F1", "F2", "D"), ns_gram=ns_gram, xi=surface_divisor({"F1": s, "F2": t}),
        h1_zero=False,
        pic0=tuple(w[i][g] for i in (1, 2) for g in gens),
        alb=tuple(a[i][g] for i in (1, 2) for g in gens),
        ns_alb=ns_alb, ns_pic0_alb=ns_pic0_alb,
    )
    morphism = MorphismData(
        push_fundamental=surface_divisor({"D": 1}),
        push_point=surface_point(1),
        push_pic0={g: alb_pair({g: 1}, {g: 1}) for g in gens},
        pull_ns={"F1": e, "F2": e, "D": -canonical},
        pull_pic0={w[i][g]: curve_divisor(0, {g: 1}) for i in (1, 2) for g in gens},
    )

    # mu_*(v) solves phi_xi(mu_*(v)) = f_*(v); mu^* solves mu^*(phi_xi(w)) = f^*(w)
    def mu_low(vec):
        return surface_divisor(pic0={**{w[1][g]: x / t for g, x in vec.items()},
                                     **{w[2][g]: x / s for g, x in vec.items()}})

    lower = {f"pic:{g}": mu_low({g: 1}) for g in gens}
    lower[POINT] = mu_low({g: -x for g, x in ve.items()})
    upper = {}
    for g in gens:
        upper[f"alb:{a[1][g]}"] = curve_divisor(0, {g: 1 / t})
        upper[f"alb:{a[2][g]}"] = curve_divisor(0, {g: 1 / s})
    upper[POINT] = curve_divisor(0, {g: -(x / t + x / s) for g, x in ve.items()})
    mu = OpaqueRule("mu_f", lower=lower, upper=upper, role="graph")
    return GeometryContext(curve, surface, morphism, opaque={"mu_f": mu}, graph_mu="mu_f").check()


def lattice_surface(ns, gram, push, xi, pull_degrees_pic0, genus=2, nt=None) -> GeometryContext:
    """A surface with H^1 = 0 given only by its Neron-Severi lattice.

    The diagonal is not assumed to decompose, so the graph stays symbolic.
    """
    gens = _gens(min(genus, 2))
    curve = CurveData(genus=genus, pic0=gens, nt_gram=_nt(len(gens), nt))
    surface = SurfaceData(ns=tuple(ns), ns_gram=tuple(tuple(Q(x) for x in r) for r in gram),
                          xi=surface_divisor(xi), h1_zero=True)
    morphism = MorphismData(
        push_fundamental=surface_divisor(push),
        push_point=surface_point(1),
        pull_ns={n: curve_divisor(d, _vec(gens, p)) for n, (d, p) in pull_degrees_pic0.items()},
    )
    return GeometryContext(curve, surface, morphism).check()


def k3_lattice() -> GeometryContext:
    """NS = U + <-2> with a curve of class E + 2F."""
    return lattice_surface(
        ns=("E", "F", "R"), gram=((0, 1, 0), (1, 0, 0), (0, 0, -2)),
        push={"E": 1, "F": 2}, xi={"E": Fraction(1, 3), "F": Fraction(1, 3)},
        pull_degrees_pic0={"E": (2, (1, 1)), "F": (1, (0, -1)), "R": (0, (3, 1))},
    )


def rank_two_lattice() -> GeometryContext:
    return lattice_surface(
        ns=("A", "B"), gram=((2, 1), (1, -2)),
        push={"A": 1, "B": 1}, xi={"A": Fraction(1, 3)},
        pull_degrees_pic0={"A": (3, (1, 0)), "B": (-1, (-1, 2))}, genus=3,
    )
