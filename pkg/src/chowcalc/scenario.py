"""Scenario files: JSON documents with every number written as a "p/q" string.

A scenario carries a geometry block (curve, surface, morphism, opaque rule
tables), and optionally an arithmetic-surface block, a semistable block
and named cycles.  Parsing checks referential integrity and reports the
JSON path of the offending entry.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import corpus
from .classes import CURVE, SURFACE, FactorClass, GradingError, label_codim
from .context import CurveData, GeometryContext, MorphismData, OpaqueRule, SurfaceData
from .heights import ArithSurfaceData, HeightError
from .semistable import ChartError, SpecialFiberCurve, SpecialFiberSurface

DATA_DIR = Path(__file__).parent / "data" / "scenarios"
SUFFIX = ".scn"
_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")


class ScenarioError(ValueError):
    """Malformed scenario; ``where`` is a JSON path or "line L, column C"."""

    def __init__(self, message: str, where: str = ""):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


# ---- rationals and classes ----------------------------------------------------------

def parse_rational(x, where: str = "") -> Fraction:
    if isinstance(x, bool) or not isinstance(x, (str, int)):
        raise ScenarioError(f"expected a rational string 'p/q', got {x!r}", where)
    text = str(x).strip()
    if not _RATIONAL.match(text):
        raise ScenarioError(f"not an exact rational: {x!r}", where)
    try:
        return Fraction(text)
    except ZeroDivisionError:
        raise ScenarioError(f"zero denominator in {x!r}", where) from None


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _matrix(rows, where: str):
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise ScenarioError("expected a list of rows", where)
    return tuple(tuple(parse_rational(x, f"{where}[{i}][{j}]") for j, x in enumerate(r))
                 for i, r in enumerate(rows))


def _terms(obj, space: str, codim: int, allowed: set, where: str) -> FactorClass:
    if not isinstance(obj, dict):
        raise ScenarioError("expected an object {label: 'p/q'}", where)
    coeffs = {}
    for label, value in obj.items():
        if label not in allowed:
            raise ScenarioError(f"undeclared label {label!r}", where)
        try:
            got = label_codim(space, label)
        except GradingError as exc:
            raise ScenarioError(str(exc), where) from None
        if got != codim:
            raise ScenarioError(f"label {label!r} has codim {got}, expected {codim}", where)
        coeffs[label] = parse_rational(value, f"{where}.{label}")
    return FactorClass.of(space, codim, coeffs)


def _emit(cls: FactorClass) -> dict:
    return {label: format_rational(c) for label, c in cls.terms}


def _names(obj, where: str) -> tuple[str, ...]:
    if obj is None:
        return ()
    if not isinstance(obj, list) or not all(isinstance(x, str) for x in obj):
        raise ScenarioError("expected a list of names", where)
    if len(set(obj)) != len(obj):
        raise ScenarioError("repeated name", where)
    return tuple(obj)


def _keys_declared(obj, declared, where: str) -> dict:
    if obj is None:
        return {}
    if not isinstance(obj, dict):
        raise ScenarioError("expected an object", where)
    for k in obj:
        if k not in declared:
            raise ScenarioError(f"undeclared name {k!r}", where)
    return obj


# ---- the geometry block ------------------------------------------------------------

def _curve_labels(pic0, codim):
    return {"C"} if codim == 0 else {"pt"} | {f"pic:{p}" for p in pic0}


def _surface_labels(ns, pic0, alb, codim):
    if codim == 0:
        return {"S"}
    if codim == 1:
        return {f"ns:{n}" for n in ns} | {f"pic:{w}" for w in pic0}
    return {"pt"} | {f"alb:{a}" for a in alb}


def parse_geometry(doc: dict, where: str = "geometry") -> GeometryContext:
    if not isinstance(doc, dict):
        raise ScenarioError("expected an object", where)
    cur = doc.get("curve")
    if not isinstance(cur, dict):
        raise ScenarioError("missing curve block", where)
    genus = cur.get("genus")
    if not isinstance(genus, int) or isinstance(genus, bool) or genus < 0:
        raise ScenarioError("genus must be a non-negative integer", f"{where}.curve.genus")
    pic0 = _names(cur.get("pic0"), f"{where}.curve.pic0")
    nt = _matrix(cur.get("nt_gram", []), f"{where}.curve.nt_gram")
    if len(nt) != len(pic0) or any(len(r) != len(pic0) for r in nt):
        raise ScenarioError(f"Neron-Tate Gram must be {len(pic0)}x{len(pic0)}", f"{where}.curve.nt_gram")
    c1 = _curve_labels(pic0, 1)
    cclasses = {k: _terms(v, CURVE, 1, c1, f"{where}.curve.classes.{k}")
                for k, v in (cur.get("classes") or {}).items()}
    curve = CurveData(genus, pic0, nt, cclasses)

    sur = doc.get("surface")
    if not isinstance(sur, dict):
        raise ScenarioError("missing surface block", where)
    ns = _names(sur.get("ns"), f"{where}.surface.ns")
    spic0 = _names(sur.get("pic0"), f"{where}.surface.pic0")
    alb = _names(sur.get("alb"), f"{where}.surface.alb")
    gram = _matrix(sur.get("ns_gram", []), f"{where}.surface.ns_gram")
    if len(gram) != len(ns) or any(len(r) != len(ns) for r in gram):
        raise ScenarioError(f"NS Gram must be {len(ns)}x{len(ns)}", f"{where}.surface.ns_gram")
    s1 = _surface_labels(ns, spic0, alb, 1)
    s2 = _surface_labels(ns, spic0, alb, 2)
    if "xi" not in sur:
        raise ScenarioError("missing xi", f"{where}.surface")
    xi = _terms(sur["xi"], SURFACE, 1, s1, f"{where}.surface.xi")
    ns_alb = {}
    for n, entry in enumerate(sur.get("ns_alb") or []):
        w = f"{where}.surface.ns_alb[{n}]"
        pair = entry.get("pair") if isinstance(entry, dict) else None
        if not isinstance(pair, list) or len(pair) != 2 or not set(pair) <= set(ns):
            raise ScenarioError("pair must name two declared NS classes", w)
        ns_alb[tuple(sorted(pair))] = _terms(entry.get("class", {}), SURFACE, 2, s2, f"{w}.class")
    npa = {}
    for n, table in _keys_declared(sur.get("ns_pic0_alb"), ns, f"{where}.surface.ns_pic0_alb").items():
        w = f"{where}.surface.ns_pic0_alb.{n}"
        npa[n] = {k: _terms(v, SURFACE, 2, s2, f"{w}.{k}") for k, v in _keys_declared(table, spic0, w).items()}
    sclasses = {k: _terms(v, SURFACE, 1, s1, f"{where}.surface.classes.{k}")
                for k, v in (sur.get("classes") or {}).items()}
    surface = SurfaceData(ns, gram, xi, bool(sur.get("h1_zero", True)), spic0, alb, ns_alb, npa,
                          bool(sur.get("chow_trivial", False)), sclasses)

    morphism = None
    mor = doc.get("morphism")
    if mor is not None:
        w = f"{where}.morphism"
        if not isinstance(mor, dict):
            raise ScenarioError("expected an object", w)
        for key in ("push_fundamental", "push_point"):
            if key not in mor:
                raise ScenarioError(f"missing {key}", w)
        morphism = MorphismData(
            push_fundamental=_terms(mor["push_fundamental"], SURFACE, 1, s1, f"{w}.push_fundamental"),
            push_point=_terms(mor["push_point"], SURFACE, 2, s2, f"{w}.push_point"),
            push_pic0={k: _terms(v, SURFACE, 2, s2, f"{w}.push_pic0.{k}")
                       for k, v in _keys_declared(mor.get("push_pic0"), pic0, f"{w}.push_pic0").items()},
            pull_ns={k: _terms(v, CURVE, 1, c1, f"{w}.pull_ns.{k}")
                     for k, v in _keys_declared(mor.get("pull_ns"), ns, f"{w}.pull_ns").items()},
            pull_pic0={k: _terms(v, CURVE, 1, c1, f"{w}.pull_pic0.{k}")
                       for k, v in _keys_declared(mor.get("pull_pic0"), spic0, f"{w}.pull_pic0").items()},
            birational=bool(mor.get("birational", True)),
            gross_schoen_vanishing=bool(mor.get("gross_schoen_vanishing", False)),
            name=str(mor.get("name", "f")),
        )

    opaque = {}
    for n, rule in enumerate(doc.get("opaque") or []):
        w = f"{where}.opaque[{n}]"
        if not isinstance(rule, dict) or not isinstance(rule.get("name"), str):
            raise ScenarioError("each rule needs a name", w)
        all_c = _curve_labels(pic0, 0) | c1
        all_s = _surface_labels(ns, spic0, alb, 1) | s2
        lower = {}
        for a, v in (rule.get("lower") or {}).items():
            if a not in all_c:
                raise ScenarioError(f"undeclared curve label {a!r}", f"{w}.lower")
            lower[a] = _terms(v, SURFACE, label_codim(CURVE, a), _surface_labels(ns, spic0, alb, label_codim(CURVE, a)),
                              f"{w}.lower.{a}")
        upper = {}
        for b, v in (rule.get("upper") or {}).items():
            if b not in all_s:
                raise ScenarioError(f"undeclared surface label {b!r}", f"{w}.upper")
            k = label_codim(SURFACE, b) - 1
            upper[b] = _terms(v, CURVE, k, _curve_labels(pic0, k), f"{w}.upper.{b}")
        opaque[rule["name"]] = OpaqueRule(rule["name"], lower, upper, str(rule.get("role", "generic")))
    graph_mu = doc.get("graph_mu")
    if graph_mu is not None and graph_mu not in opaque:
        raise ScenarioError(f"graph_mu names an undeclared rule {graph_mu!r}", where)
    return GeometryContext(curve, surface, morphism, opaque, graph_mu)


def emit_geometry(ctx: GeometryContext) -> dict:
    c, s, m = ctx.curve, ctx.surface, ctx.morphism

    def mat(rows):
        return [[format_rational(x) for x in r] for r in rows]

    out = {
        "curve": {"genus": c.genus, "pic0": list(c.pic0), "nt_gram": mat(c.nt_gram),
                  "classes": {k: _emit(v) for k, v in c.classes.items()}},
        "surface": {
            "ns": list(s.ns), "ns_gram": mat(s.ns_gram), "xi": _emit(s.xi), "h1_zero": s.h1_zero,
            "pic0": list(s.pic0), "alb": list(s.alb),
            "ns_alb": [{"pair": list(k), "class": _emit(v)} for k, v in s.ns_alb.items()],
            "ns_pic0_alb": {n: {k: _emit(v) for k, v in t.items()} for n, t in s.ns_pic0_alb.items()},
            "chow_trivial": s.chow_trivial,
            "classes": {k: _emit(v) for k, v in s.classes.items()},
        },
    }
    if m is not None:
        out["morphism"] = {
            "push_fundamental": _emit(m.push_fundamental), "push_point": _emit(m.push_point),
            "push_pic0": {k: _emit(v) for k, v in m.push_pic0.items()},
            "pull_ns": {k: _emit(v) for k, v in m.pull_ns.items()},
            "pull_pic0": {k: _emit(v) for k, v in m.pull_pic0.items()},
            "birational": m.birational, "gross_schoen_vanishing": m.gross_schoen_vanishing, "name": m.name,
        }
    if ctx.opaque:
        out["opaque"] = [{"name": r.name, "role": r.role,
                          "lower": {k: _emit(v) for k, v in r.lower.items()},
                          "upper": {k: _emit(v) for k, v in r.upper.items()}} for r in ctx.opaque.values()]
    if ctx.graph_mu is not None:
        out["graph_mu"] = ctx.graph_mu
    return out


# ---- the optional blocks -------------------------------------------------------------

_ARITH_KEYS = ("omega_sq", "omega_P", "P_sq", "F_P")


def parse_arith(doc, where: str = "arith") -> ArithSurfaceData:
    if not isinstance(doc, dict):
        raise ScenarioError("expected an object", where)
    genus = doc.get("genus")
    if not isinstance(genus, int) or isinstance(genus, bool):
        raise ScenarioError("genus must be an integer", f"{where}.genus")
    try:
        if "k3_h" in doc:
            data = ArithSurfaceData.k3(genus, parse_rational(doc.get("omega_sq"), f"{where}.omega_sq"),
                                       parse_rational(doc["k3_h"], f"{where}.k3_h"))
            return data
        vals = {k: parse_rational(doc.get(k, "0"), f"{where}.{k}") for k in _ARITH_KEYS}
        return ArithSurfaceData(genus, smooth=bool(doc.get("smooth", True)), **vals)
    except HeightError as exc:
        raise ScenarioError(str(exc), where) from None


def emit_arith(data: ArithSurfaceData) -> dict:
    out = {"genus": data.genus}
    out.update({k: format_rational(getattr(data, k)) for k in _ARITH_KEYS})
    out["smooth"] = data.smooth
    return out


@dataclass(frozen=True)
class SemistableBlock:
    curve: SpecialFiberCurve
    surface: SpecialFiberSurface
    schedule: tuple | None = None


def parse_semistable(doc, where: str = "semistable") -> SemistableBlock:
    if not isinstance(doc, dict):
        raise ScenarioError("expected an object", where)
    try:
        c = doc.get("curve") or {}
        s = doc.get("surface") or {}
        curve = SpecialFiberCurve(tuple(c.get("components", ())), tuple(map(tuple, c.get("nodes", ()))))
        surf = SpecialFiberSurface(tuple(s.get("components", ())), tuple(map(tuple, s.get("double_curves", ()))),
                                   tuple(map(tuple, s.get("triple_points", ()))))
    except (ChartError, TypeError) as exc:
        raise ScenarioError(str(exc), where) from None
    schedule = doc.get("schedule")
    if schedule is not None:
        if not isinstance(schedule, list) or not all(isinstance(x, list) and len(x) == 2 for x in schedule):
            raise ScenarioError("schedule must be a list of [curve component, surface component]",
                                f"{where}.schedule")
        schedule = tuple(tuple(x) for x in schedule)
    return SemistableBlock(curve, surf, schedule)


def emit_semistable(block: SemistableBlock) -> dict:
    out = {
        "curve": {"components": list(block.curve.components), "nodes": [list(n) for n in block.curve.nodes]},
        "surface": {"components": list(block.surface.components),
                    "double_curves": [list(d) for d in block.surface.double_curves],
                    "triple_points": [list(t) for t in block.surface.triple_points]},
    }
    if block.schedule is not None:
        out["schedule"] = [list(c) for c in block.schedule]
    return out


# ---- scenarios ---------------------------------------------------------------------

@dataclass(frozen=True)
class Scenario:
    name: str
    provenance: str = ""
    geometry: GeometryContext | None = None
    arith: ArithSurfaceData | None = None
    semistable: SemistableBlock | None = None
    cycles: dict = field(default_factory=dict)   # name -> cycle expression text
    expect: dict = field(default_factory=dict)   # recorded expectations, free-form strings


def from_dict(doc) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError("a scenario is a JSON object")
    meta = doc.get("metadata") or {}
    name = meta.get("name")
    if not isinstance(name, str) or not name:
        raise ScenarioError("metadata.name is required", "metadata")
    geometry = parse_geometry(doc["geometry"]) if "geometry" in doc else None
    arith = parse_arith(doc["arith"]) if "arith" in doc else None
    semi = parse_semistable(doc["semistable"]) if "semistable" in doc else None
    cycles = doc.get("cycles") or {}
    if not isinstance(cycles, dict) or not all(isinstance(v, str) for v in cycles.values()):
        raise ScenarioError("cycles must map names to expression strings", "cycles")
    expect = doc.get("expect") or {}
    if not isinstance(expect, dict):
        raise ScenarioError("expect must be an object", "expect")
    return Scenario(name, str(meta.get("provenance", "")), geometry, arith, semi, dict(cycles), dict(expect))


def to_dict(sc: Scenario) -> dict:
    out = {"metadata": {"name": sc.name, "provenance": sc.provenance}}
    if sc.geometry is not None:
        out["geometry"] = emit_geometry(sc.geometry)
    if sc.arith is not None:
        out["arith"] = emit_arith(sc.arith)
    if sc.semistable is not None:
        out["semistable"] = emit_semistable(sc.semistable)
    if sc.cycles:
        out["cycles"] = dict(sc.cycles)
    if sc.expect:
        out["expect"] = dict(sc.expect)
    return out


def loads(text: str) -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from None
    return from_dict(doc)


def dumps(sc: Scenario) -> str:
    return json.dumps(to_dict(sc), indent=2) + "\n"


def load(path) -> Scenario:
    return loads(Path(path).read_text())


def save(sc: Scenario, path) -> None:
    Path(path).write_text(dumps(sc))


def validate(sc: Scenario) -> list:
    """Invariant results for the geometry block (empty when there is none)."""
    return sc.geometry.validate() if sc.geometry is not None else []


def bundled_paths() -> list[Path]:
    return sorted(DATA_DIR.glob(f"*{SUFFIX}"))


def bundled() -> list[Scenario]:
    return [load(p) for p in bundled_paths()]


def bundled_by_name(name: str) -> Scenario:
    path = DATA_DIR / (name if name.endswith(SUFFIX) else name + SUFFIX)
    if not path.exists():
        raise ScenarioError(f"no bundled scenario {name!r}")
    return load(path)


# ---- the bundled corpus --------------------------------------------------------------

_GEOMETRY_CYCLES = {"Gamma": "Gamma", "gamma": "gamma"}


def corpus_scenarios() -> list[Scenario]:
    """The scenarios shipped in ``data/scenarios``, rebuilt from the corpus builders."""
    out = []
    for n in (1, 2, 3, 4):
        out.append(Scenario(f"p2_degree{n}", "plane curve of degree n, xi = H/n",
                            corpus.plane_curve(n), cycles=dict(_GEOMETRY_CYCLES), expect={"gamma_zero": "true"}))
    for a, b in ((1, 1), (2, 3), (5, 2)):
        out.append(Scenario(f"p1xp1_{a}_{b}", f"curve of class {a}H1 + {b}H2 on P1 x P1",
                            corpus.p1xp1_curve(a, b), cycles=dict(_GEOMETRY_CYCLES)))
    for g, s, t in ((2, Fraction(1, 2), Fraction(1, 2)), (3, Fraction(1, 3), Fraction(2, 3))):
        out.append(Scenario(f"triple_product_g{g}", "diagonal curve in C x C",
                            corpus.triple_product(g, s, t, v_e=(1, 0)), cycles=dict(_GEOMETRY_CYCLES)))
    out.append(Scenario("k3_lattice", "NS = U + <-2>", corpus.k3_lattice(), cycles=dict(_GEOMETRY_CYCLES)))
    out.append(Scenario("rank_two_lattice", "indefinite rank-two NS", corpus.rank_two_lattice(),
                        cycles=dict(_GEOMETRY_CYCLES)))
    out.append(Scenario("arith_k3_g2", "smooth K3 family, g = 2, omega^2 = 1, h = 1",
                        arith=ArithSurfaceData.k3(2, 1, 1), expect={"height": "5/2"}))
    out.append(Scenario("arith_generic", "rational intersection numbers",
                        arith=ArithSurfaceData(3, 5, 2, 1, 1), expect={"height": "-11/3"}))
    out.append(Scenario("arith_d_zero", "F.P = 2g - 2, so d = 0",
                        arith=ArithSurfaceData(2, 3, 1, 0, 2), expect={"height_refused": "d = 0"}))
    out.append(Scenario("semistable_node_triple", "two curve components with a node, three surface components",
                        semistable=SemistableBlock(
                            SpecialFiberCurve(("A1", "A2"), (("A1", "A2"),)),
                            SpecialFiberSurface(("B1", "B2", "B3"), (("B1", "B2"), ("B1", "B3"), ("B2", "B3")),
                                                (("B1", "B2", "B3"),)))))
    out.append(Scenario("semistable_smooth_curve", "smooth curve fiber, any surface fiber",
                        semistable=SemistableBlock(
                            SpecialFiberCurve(("A1",)),
                            SpecialFiberSurface(("B1", "B2", "B3"), (("B1", "B2"), ("B2", "B3")), ()))))
    return out


def write_corpus(directory=DATA_DIR) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for sc in corpus_scenarios():
        path = directory / (sc.name + SUFFIX)
        save(sc, path)
        paths.append(path)
    return paths
