"""Monomial charts of C x_R S and the component blow-up schedule.

A chart is a presentation R[[vars]]/(relations) in which every relation is
``monomial = monomial`` or ``monomial = pi``.  Each chart variable remembers
its Laurent exponent vector in the original coordinates x1, x2, y1, y2, y3,
so a special-fiber component (the divisorial valuation with value 1 on
x_i, y_j and pi) can be located in any chart: it is visible when it is
non-negative on every variable, and its ideal there is generated by the
variables where it is positive.
"""

from __future__ import annotations

import itertools
import math
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg

PI = "pi"
ORIGINAL = ("x1", "x2", "y1", "y2", "y3")

Mono = tuple  # sorted ((var, exponent), ...)


class ChartError(ValueError):
    """Malformed chart, center, fiber or schedule."""


def mono(*vars_: str, **powers: int) -> Mono:
    d: dict[str, int] = {}
    for v in vars_:
        d[v] = d.get(v, 0) + 1
    for v, k in powers.items():
        d[v] = d.get(v, 0) + k
    return _norm(d)


def _norm(d: dict) -> Mono:
    return tuple(sorted((v, k) for v, k in d.items() if k))


def _mono_str(m: Mono) -> str:
    if not m:
        return "1"
    return "".join(v if k == 1 else f"{v}^{k}" for v, k in m)


def _relation_str(rel) -> str:
    lhs, rhs = rel
    return f"{_mono_str(lhs)}-{PI if rhs == PI else _mono_str(rhs)}"


# ---- charts ------------------------------------------------------------------------

@dataclass(frozen=True)
class LocalChart:
    """R[[vars]]/(relations) at a point where all variables vanish."""
    vars: tuple[str, ...]
    relations: tuple
    expr: dict = field(default_factory=dict, compare=False, hash=False)
    label: str = field(default="", compare=False)

    def __post_init__(self):
        for lhs, rhs in self.relations:
            for m in (lhs, rhs):
                if m == PI:
                    continue
                unknown = {v for v, _ in m} - set(self.vars)
                if unknown:
                    raise ChartError(f"relation uses undeclared variables {sorted(unknown)}")
        if self.relations and any(lhs == PI for lhs, _ in self.relations):
            raise ChartError("pi may only appear on the right-hand side")

    def __str__(self) -> str:
        rels = ", ".join(_relation_str(r) for r in self.relations)
        return f"R[[{', '.join(self.vars)}]]/({rels})"

    def valuation(self, w: dict[str, int]) -> dict[str, int]:
        """Value of the valuation ``w`` (on original coordinates) on each chart variable."""
        return {v: sum(w.get(o, 0) * e for o, e in zip(ORIGINAL, self.expr[v])) for v in self.vars}

    def ideal_of(self, w: dict[str, int]) -> tuple[str, ...] | None:
        """Generators of the component ideal, or None when the component is not visible."""
        vals = self.valuation(w)
        if any(x < 0 for x in vals.values()):
            return None
        return tuple(v for v in self.vars if vals[v] > 0)

    def is_semistable(self) -> bool:
        return is_strictly_semistable(self)

    def key(self):
        return (self.vars, self.relations)


def make_chart(vars_, relations, label="") -> LocalChart:
    """A chart in the original coordinates (each variable is its own exponent vector)."""
    expr = {}
    for v in vars_:
        if v not in ORIGINAL:
            raise ChartError(f"{v} is not an original coordinate")
        expr[v] = tuple(int(o == v) for o in ORIGINAL)
    return LocalChart(tuple(vars_), tuple(relations), expr, label)


def component_valuation(i: int, j: int) -> dict[str, int]:
    """The local component V(x_i, y_j)."""
    return {f"x{i}": 1, f"y{j}": 1}


# ---- normal form -------------------------------------------------------------------

def _subst(m: Mono, var: str, repl: Mono) -> Mono:
    d = dict(m)
    k = d.pop(var, 0)
    for v, e in repl:
        d[v] = d.get(v, 0) + k * e
    return _norm(d)


def normal_form(chart: LocalChart) -> LocalChart:
    """Cancel common factors, eliminate solved variables, merge pi-relations."""
    vars_ = list(chart.vars)
    rels = list(chart.relations)
    expr = dict(chart.expr)
    changed = True
    while changed:
        changed = False
        # merge extra pi-relations m2 = pi into m2 = m1
        pis = [k for k, (_, rhs) in enumerate(rels) if rhs == PI]
        if len(pis) > 1:
            first = rels[pis[0]][0]
            for k in pis[1:]:
                rels[k] = (rels[k][0], first)
            changed = True
        out = []
        for lhs, rhs in rels:
            if rhs == PI:
                if not lhs:
                    raise ChartError("relation 1 = pi")
                out.append((lhs, rhs))
                continue
            a, b = dict(lhs), dict(rhs)
            for v in set(a) & set(b):
                k = min(a[v], b[v])
                a[v] -= k
                b[v] -= k
            lhs2, rhs2 = _norm(a), _norm(b)
            if (lhs2, rhs2) != (lhs, rhs):
                changed = True
            if not lhs2 and not rhs2:
                changed = True
                continue
            if not lhs2 or not rhs2:
                raise ChartError(f"relation {_mono_str(lhs2 or rhs2)} = 1 makes a coordinate a unit")
            out.append((lhs2, rhs2) if lhs2 <= rhs2 else (rhs2, lhs2))
        rels = out
        # eliminate v = monomial when v occurs nowhere else in that relation
        for k, (lhs, rhs) in enumerate(rels):
            if rhs == PI:
                continue
            solved = None
            for side, other in ((lhs, rhs), (rhs, lhs)):
                if len(side) == 1 and side[0][1] == 1 and side[0][0] not in dict(other):
                    solved = (side[0][0], other)
                    break
            if solved is None:
                continue
            var, repl = solved
            rels = [(_subst(l2, var, repl), r2 if r2 == PI else _subst(r2, var, repl))
                    for j, (l2, r2) in enumerate(rels) if j != k]
            vars_.remove(var)
            expr.pop(var, None)
            changed = True
            break
    rels = sorted(set(rels), key=lambda r: (r[1] != PI, r))
    return LocalChart(tuple(vars_), tuple(rels), expr, chart.label)


def is_strictly_semistable(chart: LocalChart) -> bool:
    """R[[t1..t4]]/(t1...tq - pi): four variables and one squarefree pi-relation."""
    nf = normal_form(chart)
    if len(nf.vars) != 4 or len(nf.relations) != 1:
        return False
    lhs, rhs = nf.relations[0]
    return rhs == PI and bool(lhs) and all(k == 1 for _, k in lhs)


# ---- blow-ups ----------------------------------------------------------------------

def _fresh(name: str, taken) -> str:
    new = name + "'"
    while new in taken:
        new += "'"
    return new


def blowup_chart(chart: LocalChart, center) -> list[LocalChart]:
    """Blow up the ideal generated by chart variables (or by a component valuation).

    ``center`` is a tuple of variable names or a valuation dict.  A center
    with fewer than two generators is Cartier (or absent) and leaves the chart
    unchanged.  Otherwise the chart where generator r is the denominator has
    new variables s' = s / r for the other generators s.
    """
    if isinstance(center, dict):
        gens = chart.ideal_of(center)
        if gens is None:
            return [chart]
    else:
        gens = tuple(center)
        unknown = set(gens) - set(chart.vars)
        if unknown:
            raise ChartError(f"center uses unknown variables {sorted(unknown)}")
    if len(gens) < 2:
        return [chart]
    out = []
    for r in gens:
        taken = set(chart.vars)
        rename = {}
        for s in gens:
            if s != r:
                rename[s] = _fresh(s, taken)
                taken.add(rename[s])
        vars_ = tuple(rename.get(v, v) for v in chart.vars)
        expr = {rename.get(v, v): chart.expr[v] for v in chart.vars}
        for s, s_new in rename.items():
            expr[s_new] = tuple(a - b for a, b in zip(chart.expr[s], chart.expr[r]))

        def sub(m):
            if m == PI:
                return m
            d: dict[str, int] = {}
            for v, k in m:
                if v in rename:
                    d[rename[v]] = d.get(rename[v], 0) + k
                    d[r] = d.get(r, 0) + k
                else:
                    d[v] = d.get(v, 0) + k
            return _norm(d)

        rels = []
        for lhs, rhs in chart.relations:
            new_l, new_r = sub(lhs), sub(rhs)
            if rhs != PI:
                # strict transform: divide out the common power of the denominator
                k = min(dict(new_l).get(r, 0), dict(new_r).get(r, 0))
                new_l = _norm({**dict(new_l), r: dict(new_l).get(r, 0) - k})
                new_r = _norm({**dict(new_r), r: dict(new_r).get(r, 0) - k})
            rels.append((new_l, new_r))
        label = f"{chart.label}/{r}" if chart.label else r
        out.append(normal_form(LocalChart(vars_, tuple(rels), expr, label)))
    return out


def same_presentation(chart: LocalChart, vars_, relations) -> bool:
    """True when some renaming of variables turns ``chart`` into the given presentation."""
    nf = normal_form(chart)
    target = normal_form(LocalChart(tuple(vars_), tuple(relations),
                                    {v: (0,) * len(ORIGINAL) for v in vars_}))
    if len(nf.vars) != len(target.vars):
        return False
    goal = {_canon_rel(r) for r in target.relations}
    for perm in itertools.permutations(target.vars):
        ren = dict(zip(nf.vars, perm))
        moved = set()
        for lhs, rhs in nf.relations:
            new_l = _norm({ren[v]: k for v, k in lhs})
            new_r = rhs if rhs == PI else _norm({ren[v]: k for v, k in rhs})
            moved.add(_canon_rel((new_l, new_r)))
        if moved == goal:
            return True
    return False


def _canon_rel(rel):
    lhs, rhs = rel
    if rhs == PI:
        return rel
    return (lhs, rhs) if lhs <= rhs else (rhs, lhs)


# ---- local models ------------------------------------------------------------------

CURVE_POINTS = ("node", "smooth")
SURFACE_POINTS = ("double", "triple", "smooth")


def local_models_at(point_type) -> LocalChart:
    """The complete local ring of C x_R S at a point of the given type.

    ``point_type`` is (curve point, surface point) with the curve point
    ``node`` or ``smooth`` and the surface point ``double``, ``triple`` or
    ``smooth``.  On a node x_i cuts out the branch A_i; near a double curve or
    triple point y_j cuts out B_j.  For a smooth x smooth point the
    coordinate y3 plays the role of the uniformizer.
    """
    try:
        cp, sp = point_type
    except (TypeError, ValueError):
        raise ChartError(f"point type must be a pair, got {point_type!r}") from None
    if cp not in CURVE_POINTS or sp not in SURFACE_POINTS:
        raise ChartError(f"invalid point type {point_type!r}")
    label = f"{cp}x{sp}"
    if cp == "node" and sp == "double":
        return make_chart(ORIGINAL, [(mono("y1", "y2"), PI), (mono("x1", "x2"), mono("y1", "y2"))], label)
    if cp == "node" and sp == "triple":
        return make_chart(ORIGINAL, [(mono("y1", "y2", "y3"), PI), (mono("x1", "x2"), mono("y1", "y2", "y3"))], label)
    if cp == "node":
        return make_chart(("x1", "x2", "y1", "y2"), [(mono("x1", "x2"), PI)], label)
    if sp == "double":
        return make_chart(("x1", "y1", "y2", "y3"), [(mono("y1", "y2"), PI)], label)
    if sp == "triple":
        return make_chart(("x1", "y1", "y2", "y3"), [(mono("y1", "y2", "y3"), PI)], label)
    return make_chart(("x1", "y1", "y2", "y3"), [(mono("y3"), PI)], label)


def non_cartier_cases() -> list[LocalChart]:
    """The three local situations in which a component is not Cartier."""
    return [
        local_models_at(("node", "double")),
        local_models_at(("node", "triple")),
        make_chart(ORIGINAL, [(mono("y1", "y2", "y3"), PI), (mono("x1", "x2"), mono("y1", "y2"))], "mixed"),
    ]


# ---- special fibers ----------------------------------------------------------------

@dataclass(frozen=True)
class SpecialFiberCurve:
    components: tuple[str, ...]
    nodes: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "nodes", tuple(tuple(n) for n in self.nodes))
        if len(set(self.components)) != len(self.components):
            raise ChartError("repeated curve component")
        for n in self.nodes:
            if len(n) != 2 or n[0] == n[1] or not set(n) <= set(self.components):
                raise ChartError(f"node {n} must join two distinct declared components")


@dataclass(frozen=True)
class SpecialFiberSurface:
    components: tuple[str, ...]
    double_curves: tuple[tuple[str, str], ...] = ()
    triple_points: tuple[tuple[str, str, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "double_curves", tuple(tuple(d) for d in self.double_curves))
        object.__setattr__(self, "triple_points", tuple(tuple(t) for t in self.triple_points))
        if len(set(self.components)) != len(self.components):
            raise ChartError("repeated surface component")
        for d in self.double_curves:
            if len(d) != 2 or d[0] == d[1] or not set(d) <= set(self.components):
                raise ChartError(f"double curve {d} must join two distinct declared components")
        pairs = {frozenset(d) for d in self.double_curves}
        for t in self.triple_points:
            if len(set(t)) != 3 or not set(t) <= set(self.components):
                raise ChartError(f"triple point {t} must meet three distinct components")
            for a, b in itertools.combinations(t, 2):
                if frozenset((a, b)) not in pairs:
                    raise ChartError(f"triple point {t} needs a double curve between {a} and {b}")


def _meets(pairs, a, b) -> bool:
    return any(set(p) == {a, b} for p in pairs)


def classify_intersection(c1, c2, curve: SpecialFiberCurve, surf: SpecialFiberSurface) -> str:
    """Z = (A1 cap A2) x (B1 cap B2): ``smooth curve``, ``Cartier divisor`` or ``empty``."""
    (a1, b1), (a2, b2) = c1, c2
    if c1 == c2:
        raise ChartError("a component does not intersect itself in this sense")
    a_meet = a1 == a2 or _meets(curve.nodes, a1, a2)
    b_meet = b1 == b2 or _meets(surf.double_curves, b1, b2)
    if not (a_meet and b_meet):
        return "empty"
    if a1 == a2 or b1 == b2:
        return "Cartier divisor"
    return "smooth curve"


def product_components(curve: SpecialFiberCurve, surf: SpecialFiberSurface):
    """The components A x B and the type of every pairwise intersection."""
    comps = [(a, b) for a in curve.components for b in surf.components]
    z = {(c1, c2): classify_intersection(c1, c2, curve, surf)
         for c1, c2 in itertools.combinations(comps, 2)}
    return comps, z


def z_list(i, schedule, curve, surf) -> list:
    """The smooth curves Z^{k,i}, k != i, in schedule order."""
    return [k for k in schedule if k != i and classify_intersection(k, i, curve, surf) == "smooth curve"]


# ---- deep points -------------------------------------------------------------------

@dataclass(frozen=True)
class DeepPoint:
    kind: str                       # "double" or "triple"
    node: tuple[str, str]
    surface_components: tuple[str, ...]
    name: str

    def local_index(self) -> dict:
        """Global component (A, B) -> local (i, j)."""
        out = {}
        for i, a in enumerate(self.node, 1):
            for j, b in enumerate(self.surface_components, 1):
                out[(a, b)] = (i, j)
        return out

    def chart(self) -> LocalChart:
        ch = local_models_at(("node", self.kind))
        return LocalChart(ch.vars, ch.relations, ch.expr, "")


def deep_points(curve: SpecialFiberCurve, surf: SpecialFiberSurface) -> list[DeepPoint]:
    out = []
    for n, node in enumerate(curve.nodes):
        for d, dc in enumerate(surf.double_curves):
            out.append(DeepPoint("double", node, dc, f"node{n}xdouble{d}"))
        for t, tp in enumerate(surf.triple_points):
            out.append(DeepPoint("triple", node, tp, f"node{n}xtriple{t}"))
    return out


# ---- fans of the components ----------------------------------------------------------

def _primitive(v) -> tuple[int, ...]:
    den = 1
    for x in v:
        den = den * Fraction(x).denominator // math.gcd(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in v]
    g = 0
    for x in ints:
        g = math.gcd(g, abs(x))
    return tuple(x // g for x in ints) if g else tuple(ints)


def _relation_vector(kind: str) -> tuple[int, ...]:
    # x1 + x2 = y1 + y2 (+ y3) in the exponent lattice
    return (1, 1, -1, -1, -1 if kind == "triple" else 0)


def _component_base(i: int, j: int) -> list[str]:
    return [v for v in ORIGINAL if v not in (f"x{i}", f"y{j}")]


def component_fan(charts, i: int, j: int, kind: str) -> frozenset:
    """The fan of the strict transform of V(x_i, y_j), read off the charts.

    In a semistable chart the component is t = 0 for one variable t; the other
    three variables are coordinates on it.  Writing them in the original
    coordinates of the component (modulo the relation lattice) gives a matrix
    whose inverse has the rays of the cone as columns.
    """
    w = component_valuation(i, j)
    base = _component_base(i, j)
    rel = _relation_vector(kind)
    cols = [tuple(int(o == b) for o in ORIGINAL) for b in base] + [rel]
    system = [[Fraction(c[r]) for c in cols] for r in range(len(ORIGINAL))]
    cones = set()
    for ch in charts:
        gens = ch.ideal_of(w)
        if gens is None:
            continue
        if not is_strictly_semistable(ch) or len(gens) != 1:
            raise ChartError(f"component ({i},{j}) is not a single coordinate divisor in {ch}")
        rows = []
        for v in ch.vars:
            if v == gens[0]:
                continue
            sol = linalg.solve(system, [Fraction(e) for e in ch.expr[v]])
            if sol is None:
                raise ChartError(f"coordinate {v} does not restrict to the component")
            rows.append(sol[:3])
        inv = linalg.inverse(rows)
        cones.add(frozenset(_primitive([inv[r][c] for r in range(3)]) for c in range(3)))
    return frozenset(cones)


def iterated_blowup_fan(i: int, j: int, centers) -> frozenset:
    """The fan of A^3 = V(x_i, y_j) after blowing up coordinate lines in order.

    ``centers`` are local components (k, l); the line is V(x_k, y_l)
    restricted to the component, i.e. the 2-cone spanned by the rays of x_k
    and y_l, and its blow-up is the star subdivision of that cone.
    """
    base = _component_base(i, j)
    ray = {b: tuple(int(b == c) for c in base) for b in base}
    fan = {frozenset(ray.values())}
    for k, l in centers:
        a, b = ray[f"x{k}"], ray[f"y{l}"]
        new = tuple(p + q for p, q in zip(a, b))
        hit = [c for c in fan if a in c and b in c]
        if not hit:
            raise ChartError(f"the strict transform of V(x{k}, y{l}) is no longer a torus-invariant curve")
        for c in hit:
            fan.remove(c)
            fan.add((c - {a}) | {new})
            fan.add((c - {b}) | {new})
    return frozenset(fan)


# ---- running the schedule ----------------------------------------------------------

def _is_cartier(charts, w) -> bool:
    return all((g := ch.ideal_of(w)) is None or len(g) <= 1 for ch in charts)


def _meet(charts, w1, w2) -> bool:
    return any(ch.ideal_of(w1) is not None and ch.ideal_of(w2) is not None for ch in charts)


def validate_schedule(schedule, comps) -> tuple:
    schedule = tuple(tuple(c) for c in schedule)
    if len(set(schedule)) != len(schedule):
        raise ChartError("the schedule repeats a component")
    missing = set(comps) - set(schedule)
    extra = set(schedule) - set(comps)
    if missing or extra:
        raise ChartError(f"the schedule must list every component once (missing {sorted(missing)}, "
                         f"unknown {sorted(extra)})")
    return schedule


@dataclass(frozen=True)
class ChartEvent:
    step: int
    component: tuple
    point: str
    cartier: bool
    charts_before: int
    charts_after: int


@dataclass(frozen=True)
class LocalRun:
    """The blow-up schedule restricted to one deep point."""
    point: DeepPoint
    charts: tuple
    surviving: frozenset            # pairs {i, k} of local components whose Z survives
    events: tuple


def run_local(point: DeepPoint, schedule) -> LocalRun:
    """Blow up the local components in schedule order and record which Z survive.

    The strict transform of Z^{k,i} survives when, at the step of whichever of
    C^i, C^k comes first, that component is not yet Cartier and still meets
    the other one.
    """
    index = point.local_index()
    local = [c for c in schedule if c in index]
    charts = [point.chart()]
    surviving = set()
    events = []
    done = set()
    for step, comp in enumerate(schedule):
        if comp not in index:
            continue
        done.add(comp)
        k = index[comp]
        wk = component_valuation(*k)
        cartier = _is_cartier(charts, wk)
        if not cartier:
            for other in local:
                if other in done:
                    continue
                i = index[other]
                if i[0] != k[0] and i[1] != k[1] and _meet(charts, component_valuation(*i), wk):
                    surviving.add(frozenset((comp, other)))
        before = len(charts)
        charts = [c2 for c in charts for c2 in blowup_chart(c, wk)]
        events.append(ChartEvent(step, comp, point.name, cartier, before, len(charts)))
    return LocalRun(point, tuple(charts), frozenset(surviving), tuple(events))


_NON_DEEP = {
    ("node", "smooth"): [{"x1": 1}, {"x2": 1}],
    ("smooth", "double"): [{"y1": 1}, {"y2": 1}],
    ("smooth", "triple"): [{"y1": 1}, {"y2": 1}, {"y3": 1}],
    ("smooth", "smooth"): [{"y3": 1}],
}


def certify_non_deep_points() -> dict:
    """At every point that is not node x (double curve or triple point) the model is
    already strictly semistable and each component through it is Cartier, so
    no step of the schedule changes the local ring there."""
    out = {}
    for kind, comps in _NON_DEEP.items():
        ch = local_models_at(kind)
        ok = is_strictly_semistable(ch)
        for w in comps:
            gens = ch.ideal_of(w)
            ok = ok and gens is not None and len(gens) == 1 and blowup_chart(ch, w) == [ch]
        out[f"{kind[0]}x{kind[1]}"] = ok
    return out


@dataclass(frozen=True)
class TraceCheck:
    """Fan of C^i at one deep point versus blowing up its surviving Z in order."""
    component: tuple
    point: str
    centers: tuple       # global partners k, in the order that reproduced the fan
    agrees: bool


def _check_component(run: LocalRun, comp, schedule) -> TraceCheck:
    index = run.point.local_index()
    i = index[comp]
    pos = schedule.index(comp)
    partners = [k for k in schedule if k in index and frozenset((comp, k)) in run.surviving]
    before = [k for k in partners if schedule.index(k) < pos]
    after = [k for k in partners if schedule.index(k) > pos]
    try:
        realized = component_fan(run.charts, *i, run.point.kind)
    except (ChartError, ZeroDivisionError):
        return TraceCheck(comp, run.point.name, tuple(partners), False)
    # blowing up C^i itself may resolve several later Z at once ("in some order")
    for perm in itertools.permutations(after):
        centers = before + list(perm)
        if realized == iterated_blowup_fan(*i, [index[k] for k in centers]):
            return TraceCheck(comp, run.point.name, tuple(centers), True)
    return TraceCheck(comp, run.point.name, tuple(partners), False)


def _piece(run: LocalRun, a, b):
    """Name of the double-curve deep point carrying the Z between a and b at this node."""
    prefix = run.point.name.split("x", 1)[0]
    return prefix, frozenset((a[1], b[1]))


@dataclass(frozen=True)
class FinalModel:
    schedule: tuple
    components: tuple
    runs: tuple
    certified: dict
    z_lists: dict          # component -> Z-list, schedule order, self skipped
    traces: dict           # component -> ((partner, deep point), ...) in schedule order
    checks: tuple
    inconsistent: tuple    # Z pieces whose survival differs between points

    @property
    def charts(self) -> dict:
        return {r.point.name: r.charts for r in self.runs}

    @property
    def events(self) -> tuple:
        return tuple(sorted((e for r in self.runs for e in r.events), key=lambda e: (e.step, e.point)))

    @property
    def semistable(self) -> bool:
        return all(self.certified.values()) and all(
            is_strictly_semistable(c) for r in self.runs for c in r.charts)

    def center_list(self, comp) -> list:
        out = []
        for k, _ in self.traces[comp]:
            if k not in out:
                out.append(k)
        return out

    def skipped(self, comp) -> list:
        """Z-list entries with no surviving piece (the center was already Cartier)."""
        centers = self.center_list(comp)
        return [k for k in self.z_lists[comp] if k not in centers]

    @property
    def flagged(self) -> list:
        return [c for c in self.components if self.skipped(c)]

    def trace_ok(self, comp) -> bool:
        centers = self.center_list(comp)
        in_order = [k for k in self.z_lists[comp] if k in centers] == centers
        return in_order and all(ch.agrees for ch in self.checks if ch.component == comp)

    @property
    def traces_ok(self) -> bool:
        return not self.inconsistent and all(self.trace_ok(c) for c in self.components)


def run_schedule(curve: SpecialFiberCurve, surf: SpecialFiberSurface, schedule=None) -> FinalModel:
    """Blow up every component A x B once, in ``schedule`` order (default: product order)."""
    comps, _ = product_components(curve, surf)
    schedule = validate_schedule(comps if schedule is None else schedule, comps)
    runs = tuple(run_local(p, schedule) for p in deep_points(curve, surf))

    # survival of each Z piece, decided at the generic point of the piece
    verdict = {}
    for r in runs:
        if r.point.kind != "double":
            continue
        index = r.point.local_index()
        for a, b in itertools.combinations(index, 2):
            if a[0] != b[0] and a[1] != b[1]:
                verdict[(_piece(r, a, b), frozenset((a, b)))] = frozenset((a, b)) in r.surviving
    inconsistent = []
    for r in runs:
        if r.point.kind != "triple":
            continue
        index = r.point.local_index()
        for a, b in itertools.combinations(index, 2):
            if a[0] != b[0] and a[1] != b[1]:
                key = (_piece(r, a, b), frozenset((a, b)))
                if verdict.get(key) != (frozenset((a, b)) in r.surviving):
                    inconsistent.append((r.point.name, a, b))

    z_lists = {c: z_list(c, schedule, curve, surf) for c in comps}
    traces = {}
    for c in comps:
        entries = []
        for k in z_lists[c]:
            for r in runs:
                if r.point.kind == "double" and c in r.point.local_index() and k in r.point.local_index():
                    if frozenset((c, k)) in r.surviving:
                        entries.append((k, r.point.name))
        traces[c] = tuple(entries)
    checks = tuple(_check_component(r, c, schedule) for r in runs for c in schedule if c in r.point.local_index())
    return FinalModel(schedule, tuple(comps), runs, certify_non_deep_points(), z_lists, traces, checks,
                      tuple(inconsistent))


def _cname(c) -> str:
    return f"{c[0]}x{c[1]}"


def render_model(model: FinalModel) -> str:
    lines = ["schedule: " + ", ".join(_cname(c) for c in model.schedule)]
    for e in model.events:
        what = "Cartier, no change" if e.cartier else f"{e.charts_before} -> {e.charts_after} charts"
        lines.append(f"  step {e.step + 1} {_cname(e.component)} at {e.point}: {what}")
    for name, charts in model.charts.items():
        lines.append(f"final charts at {name}:")
        for ch in charts:
            mark = "ok" if is_strictly_semistable(ch) else "NOT semistable"
            lines.append(f"  {normal_form(ch)}  [{mark}]")
    for c in model.components:
        zs = ", ".join(_cname(k) for k in model.z_lists[c]) or "-"
        got = ", ".join(_cname(k) for k in model.center_list(c)) or "-"
        line = f"trace {_cname(c)}: Z-list [{zs}]  centers [{got}]  {'ok' if model.trace_ok(c) else 'MISMATCH'}"
        if model.skipped(c):
            line += "  skipped: " + ", ".join(_cname(k) for k in model.skipped(c))
        lines.append(line)
    lines.append(f"strictly semistable: {'yes' if model.semistable else 'no'}")
    lines.append(f"component traces: {'ok' if model.traces_ok else 'MISMATCH'}")
    return "\n".join(lines)


def model_as_dict(model: FinalModel) -> dict:
    return {
        "schedule": [_cname(c) for c in model.schedule],
        "semistable": model.semistable,
        "traces_ok": model.traces_ok,
        "events": [{"step": e.step + 1, "component": _cname(e.component), "point": e.point,
                    "cartier": e.cartier, "charts_before": e.charts_before, "charts_after": e.charts_after}
                   for e in model.events],
        "charts": {name: [str(normal_form(ch)) for ch in charts] for name, charts in model.charts.items()},
        "traces": {_cname(c): {"z_list": [_cname(k) for k in model.z_lists[c]],
                               "centers": [_cname(k) for k in model.center_list(c)],
                               "skipped": [_cname(k) for k in model.skipped(c)],
                               "ok": model.trace_ok(c)} for c in model.components},
        "certified": model.certified,
        "inconsistent": [list(map(str, x)) for x in model.inconsistent],
    }


# ---- random configurations ----------------------------------------------------------

def random_configuration(seed: int, max_curve: int = 4, max_surface: int = 5):
    """A random pair of special fibers and a random schedule."""
    rng = random.Random(seed)
    na = rng.randint(1, max_curve)
    nb = rng.randint(1, max_surface)
    a_names = [f"A{i}" for i in range(1, na + 1)]
    b_names = [f"B{j}" for j in range(1, nb + 1)]
    a_pairs = list(itertools.combinations(a_names, 2))
    nodes = [p for p in a_pairs if rng.random() < 0.6]
    b_pairs = list(itertools.combinations(b_names, 2))
    doubles = [p for p in b_pairs if rng.random() < 0.6]
    have = {frozenset(p) for p in doubles}
    triples = [t for t in itertools.combinations(b_names, 3)
               if all(frozenset(p) in have for p in itertools.combinations(t, 2)) and rng.random() < 0.5]
    curve = SpecialFiberCurve(tuple(a_names), tuple(nodes))
    surf = SpecialFiberSurface(tuple(b_names), tuple(doubles), tuple(triples))
    comps, _ = product_components(curve, surf)
    schedule = list(comps)
    rng.shuffle(schedule)
    return curve, surf, tuple(schedule)


@dataclass(frozen=True)
class FuzzResult:
    seed: int
    shape: tuple          # (#curve components, #surface components, #deep points)
    semistable: bool
    traces_ok: bool
    flagged: int          # components with a skipped Z-list entry


def fuzz(seeds, max_curve: int = 4, max_surface: int = 5) -> list[FuzzResult]:
    out = []
    for seed in seeds:
        curve, surf, schedule = random_configuration(seed, max_curve, max_surface)
        model = run_schedule(curve, surf, schedule)
        shape = (len(curve.components), len(surf.components), len(model.runs))
        out.append(FuzzResult(seed, shape, model.semistable, model.traces_ok, len(model.flagged)))
    return out


# ---- the chart case table ------------------------------------------------------------

# expected outcomes of blowing up (x1, y1), one pair of presentations per initial case
DISPLAYED_OUTCOMES = {
    "double": [
        (("x1'", "x2", "y1", "y3"), [("x1'x2y1", PI)]),
        (("x1", "y1'", "y2", "y3"), [("x1y1'y2", PI)]),
    ],
    "triple": [
        (("x1'", "x2", "y1", "y2", "y3"), [("y1y2y3", PI), ("x1'x2", "y2y3")]),
        (("x1", "y1'", "y2", "y3"), [("x1y1'y2y3", PI)]),
    ],
}


def parse_monomial(text: str) -> Mono:
    """``x1'x2y1`` -> monomial; variables are x or y, a digit and primes."""
    if text == PI:
        return PI
    parts = re.findall(r"([xy]\d'*)(?:\^(\d+))?", text)
    if "".join(v + (f"^{e}" if e else "") for v, e in parts) != text:
        raise ChartError(f"cannot parse monomial {text!r}")
    d: dict[str, int] = {}
    for v, e in parts:
        d[v] = d.get(v, 0) + int(e or 1)
    return _norm(d)


@dataclass(frozen=True)
class CaseRow:
    kind: str
    initial: LocalChart
    outcomes: tuple
    matches: tuple        # per displayed outcome: some outcome chart agrees up to renaming
    survivors: tuple      # outcome charts that are not strictly semistable
    resolving_centers: tuple  # local components whose blow-up makes every survivor semistable


def case_table() -> list[CaseRow]:
    rows = []
    for kind in ("double", "triple"):
        initial = local_models_at(("node", kind))
        outcomes = tuple(blowup_chart(initial, component_valuation(1, 1)))
        matches = []
        for vars_, rels in DISPLAYED_OUTCOMES[kind]:
            rels = [(parse_monomial(a), parse_monomial(b)) for a, b in rels]
            matches.append(any(same_presentation(o, vars_, rels) for o in outcomes))
        survivors = tuple(o for o in outcomes if not is_strictly_semistable(o))
        resolving = []
        js = (1, 2, 3) if kind == "triple" else (1, 2)
        for c in [(i, j) for i in (1, 2) for j in js if (i, j) != (1, 1)]:
            if survivors and all(all(is_strictly_semistable(x) for x in blowup_chart(s, component_valuation(*c)))
                                 for s in survivors):
                resolving.append(c)
        rows.append(CaseRow(kind, initial, outcomes, tuple(matches), survivors, tuple(resolving)))
    return rows
