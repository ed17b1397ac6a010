"""Numeric pairing data for X = C x S and the rule tables for its generators."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Mapping

from . import linalg
from .classes import (
    CURVE, POINT, SURFACE, FactorClass, GradingError, basis_class, curve_fundamental,
    label_codim,
)


class ContextError(ValueError):
    """Inconsistent or missing geometry data."""


class NormalizationError(ContextError):
    pass


@dataclass(frozen=True)
class InvariantResult:
    name: str
    ok: bool
    detail: str = ""


@dataclass(frozen=True)
class CurveData:
    genus: int
    pic0: tuple[str, ...] = ()
    nt_gram: tuple[tuple[Fraction, ...], ...] = ()
    classes: Mapping[str, FactorClass] = field(default_factory=dict)

    def labels(self, codim: int) -> list[str]:
        return ["C"] if codim == 0 else [POINT] + [f"pic:{p}" for p in self.pic0]


@dataclass(frozen=True)
class SurfaceData:
    ns: tuple[str, ...]
    ns_gram: tuple[tuple[Fraction, ...], ...]
    xi: FactorClass
    h1_zero: bool = True
    pic0: tuple[str, ...] = ()
    alb: tuple[str, ...] = ()
    # Albanese part of ns_i . ns_j, keyed by the sorted name pair
    ns_alb: Mapping[tuple[str, str], FactorClass] = field(default_factory=dict)
    # ns_pic0_alb[n][w] = the zero-cycle n . w (degree 0)
    ns_pic0_alb: Mapping[str, Mapping[str, FactorClass]] = field(default_factory=dict)
    # Chow group of points is Q and CH^1 = NS, so the diagonal decomposes
    chow_trivial: bool = False
    classes: Mapping[str, FactorClass] = field(default_factory=dict)

    def labels(self, codim: int) -> list[str]:
        if codim == 0:
            return ["S"]
        if codim == 1:
            return [f"ns:{n}" for n in self.ns] + [f"pic:{w}" for w in self.pic0]
        return [POINT] + [f"alb:{a}" for a in self.alb]


@dataclass(frozen=True)
class MorphismData:
    """f: C -> S through its action on the basis labels.

    ``push_fundamental`` is the class f_*C, ``push_point`` is f_*(o_C),
    ``push_pic0[v]`` is f_*(v) in Alb(S); ``pull_ns[n]`` and ``pull_pic0[w]``
    are f^*n and f^*w as divisors on C.
    """

    push_fundamental: FactorClass
    push_point: FactorClass
    push_pic0: Mapping[str, FactorClass] = field(default_factory=dict)
    pull_ns: Mapping[str, FactorClass] = field(default_factory=dict)
    pull_pic0: Mapping[str, FactorClass] = field(default_factory=dict)
    birational: bool = True
    gross_schoen_vanishing: bool = False
    name: str = "f"


@dataclass(frozen=True)
class OpaqueRule:
    """Correspondence action of an opaque codim-1 generator mu on X.

    ``lower[a]`` is mu_*(a) = pi_S*(mu . pi_C^* a) for a curve label ``a``;
    ``upper[b]`` is mu^*(b) = pi_C*(mu . pi_S^* b).  Labels not listed act as 0.
    ``role == "graph"`` declares the defining identities of the rigidified
    class attached to the graph of f.
    """

    name: str
    lower: Mapping[str, FactorClass] = field(default_factory=dict)
    upper: Mapping[str, FactorClass] = field(default_factory=dict)
    role: str = "generic"


@dataclass(frozen=True)
class GeometryContext:
    curve: CurveData
    surface: SurfaceData
    morphism: MorphismData | None = None
    opaque: Mapping[str, OpaqueRule] = field(default_factory=dict)
    graph_mu: str | None = None
    xi_scale: Fraction = Fraction(1)

    # ---- lookups -------------------------------------------------------
    def ns_index(self, name: str) -> int:
        try:
            return self.surface.ns.index(name)
        except ValueError:
            raise ContextError(f"unknown NS generator {name!r}") from None

    def nt_index(self, name: str) -> int:
        try:
            return self.curve.pic0.index(name)
        except ValueError:
            raise ContextError(f"unknown Pic^0(C) generator {name!r}") from None

    @property
    def xi(self) -> FactorClass:
        return self.surface.xi

    @property
    def xi_squared(self) -> Fraction:
        return self.surface_mul(self.xi, self.xi).degree

    @property
    def xi_dual(self) -> FactorClass:
        d = self.xi_squared
        if d == 0:
            raise ContextError("deg xi^2 = 0: no dual polarization")
        return self.xi / d

    @property
    def eta(self) -> FactorClass:
        """f^*xi, or the curve class named ``eta`` when there is no morphism."""
        if self.morphism is None:
            try:
                return self.curve.classes["eta"]
            except KeyError:
                raise ContextError("no morphism and no curve class 'eta' to polarize C") from None
        return self.f_pull(self.xi)

    def rule(self, name: str) -> OpaqueRule:
        try:
            return self.opaque[name]
        except KeyError:
            raise ContextError(f"no rule table registered for opaque generator {name!r}") from None

    def require_morphism(self) -> MorphismData:
        if self.morphism is None:
            raise ContextError("context has no morphism f: C -> S")
        return self.morphism

    # ---- products on the factors ------------------------------------------
    def label_product(self, l1: str, l2: str) -> FactorClass:
        """Product of two codim-1 surface labels as a zero-cycle."""
        s = self.surface
        if l1.startswith("ns:") and l2.startswith("ns:"):
            a, b = l1[3:], l2[3:]
            g = s.ns_gram[self.ns_index(a)][self.ns_index(b)]
            alb = s.ns_alb.get(tuple(sorted((a, b))))
            out = FactorClass.of(SURFACE, 2, {POINT: g})
            return out + alb if alb is not None else out
        if l1.startswith("pic:") and l2.startswith("pic:"):
            # two homologically trivial divisors: degree 0 and trivial Albanese image
            return FactorClass.zero(SURFACE, 2)
        ns_label, pic_label = (l1, l2) if l1.startswith("ns:") else (l2, l1)
        table = s.ns_pic0_alb.get(ns_label[3:], {})
        return table.get(pic_label[4:], FactorClass.zero(SURFACE, 2))

    def surface_mul(self, a: FactorClass, b: FactorClass) -> FactorClass | None:
        """a . b on S; ``None`` when the codimension passes dim S."""
        if a.codim + b.codim > 2:
            return None
        if a.codim == 0:
            return b * a.coeff("S")
        if b.codim == 0:
            return a * b.coeff("S")
        out = FactorClass.zero(SURFACE, 2)
        for la, ca in a.terms:
            for lb, cb in b.terms:
                out = out + self.label_product(la, lb) * (ca * cb)
        return out

    @staticmethod
    def curve_mul(a: FactorClass, b: FactorClass) -> FactorClass | None:
        if a.codim + b.codim > 1:
            return None
        return b * a.coeff("C") if a.codim == 0 else a * b.coeff("C")

    # ---- the morphism on classes -------------------------------------------
    def f_push_label(self, label: str) -> FactorClass:
        m = self.require_morphism()
        if label == "C":
            return m.push_fundamental
        if label == POINT:
            return m.push_point
        return m.push_pic0.get(label[4:], FactorClass.zero(SURFACE, 2))

    def f_push(self, c: FactorClass) -> FactorClass:
        out = FactorClass.zero(SURFACE, c.codim + 1)
        for label, coeff in c.terms:
            out = out + self.f_push_label(label) * coeff
        return out

    def f_pull_label(self, label: str) -> FactorClass | None:
        m = self.require_morphism()
        if label == "S":
            return curve_fundamental()
        if label.startswith("ns:"):
            try:
                return m.pull_ns[label[3:]]
            except KeyError:
                raise ContextError(f"f^* not given on {label}") from None
        if label.startswith("pic:"):
            return m.pull_pic0.get(label[4:], FactorClass.zero(CURVE, 1))
        return None

    def f_pull(self, b: FactorClass) -> FactorClass | None:
        if b.codim == 2:
            return None
        out = FactorClass.zero(CURVE, b.codim)
        for label, coeff in b.terms:
            out = out + self.f_pull_label(label) * coeff
        return out

    # ---- opaque generators -------------------------------------------------
    def mu_lower(self, name: str, a: FactorClass) -> FactorClass:
        rule = self.rule(name)
        out = FactorClass.zero(SURFACE, a.codim)
        for label, coeff in a.terms:
            img = rule.lower.get(label)
            if img is not None:
                out = out + img * coeff
        return out

    def mu_upper(self, name: str, b: FactorClass) -> FactorClass | None:
        if b.codim == 0:
            return None
        rule = self.rule(name)
        out = FactorClass.zero(CURVE, b.codim - 1)
        for label, coeff in b.terms:
            img = rule.upper.get(label)
            if img is not None:
                out = out + img * coeff
        return out

    # ---- Neron-Tate pairing on Pic^0(C) -------------------------------------
    def nt_pair(self, a: FactorClass, b: FactorClass, gram=None):
        """<a, b>_NT for degree-0 divisors on C.

        ``gram`` overrides the context Gram matrix; its entries may be any ring
        elements, which is how symbolic Neron-Tate input is evaluated.
        """
        for c in (a, b):
            if c.space != CURVE or c.codim != 1 or c.degree != 0:
                raise GradingError("Neron-Tate pairing needs degree-0 divisors on C")
        gram = self.curve.nt_gram if gram is None else gram
        u = [a.coeff(f"pic:{p}") for p in self.curve.pic0]
        v = [b.coeff(f"pic:{p}") for p in self.curve.pic0]
        return linalg.bilinear(u, gram, v)

    def ns_pair(self, a: FactorClass, b: FactorClass) -> Fraction:
        prod = self.surface_mul(a, b)
        if prod is None or prod.codim != 2:
            raise GradingError("NS pairing needs two divisors")
        return prod.degree

    # ---- rescaling --------------------------------------------------------
    def normalized(self) -> "GeometryContext":
        """Rescale xi so that eta = f^*xi has degree 1; the factor lands in ``xi_scale``."""
        deg = self.eta.degree
        if deg == 0:
            raise NormalizationError("deg f^*xi = 0 cannot be normalized")
        if deg == 1:
            return self
        if self.graph_mu is not None:
            # the mu table is tied to one polarization
            raise NormalizationError(
                "cannot rescale xi under a registered graph mu table; "
                "supply the table for the normalized polarization"
            )
        surface = replace(self.surface, xi=self.xi / deg)
        return replace(self, surface=surface, xi_scale=self.xi_scale / deg)

    # ---- validation -------------------------------------------------------
    def validate(self) -> list[InvariantResult]:
        return list(_validate(self))

    def check(self) -> "GeometryContext":
        bad = [r for r in self.validate() if not r.ok]
        if bad:
            raise ContextError("; ".join(f"{r.name}: {r.detail}" for r in bad))
        return self


def _validate(ctx: GeometryContext):
    s, c = ctx.surface, ctx.curve
    n = len(s.ns)
    gram_ok = len(s.ns_gram) == n and linalg.is_symmetric(s.ns_gram)
    yield InvariantResult("ns_gram_symmetric", gram_ok, "" if gram_ok else "NS Gram matrix is not symmetric")
    nt_ok = len(c.nt_gram) == len(c.pic0) and (not c.pic0 or linalg.is_positive_semidefinite(c.nt_gram))
    yield InvariantResult("nt_gram_psd", nt_ok, "" if nt_ok else "Neron-Tate Gram matrix not symmetric PSD")
    if not gram_ok:
        return
    try:
        xi2 = ctx.xi_squared
    except (GradingError, ContextError) as exc:
        yield InvariantResult("xi_ample", False, str(exc))
        return
    yield InvariantResult("xi_ample", xi2 > 0, f"deg xi^2 = {xi2}")
    h1_ok = not (s.h1_zero and (s.pic0 or s.alb))
    yield InvariantResult("h1_zero_flag", h1_ok, "" if h1_ok else "H^1(S)=0 but Pic^0(S)/Alb(S) generators declared")
    if s.chow_trivial:
        ok = s.h1_zero and linalg.det(s.ns_gram) != 0
        yield InvariantResult("chow_trivial_surface", ok, "" if ok else "diagonal decomposition needs H^1(S)=0 and unimodular-over-Q NS")

    defined = {("C", lab) for lab in c.labels(1)} | {("S", lab) for k in (1, 2) for lab in s.labels(k)}
    for cls in list(c.classes.values()) + list(s.classes.values()):
        missing = [lab for lab, _ in cls.terms if (cls.space, lab) not in defined and lab not in ("C", "S")]
        if missing:
            yield InvariantResult("referential_integrity", False, f"undeclared labels {missing}")

    m = ctx.morphism
    if m is not None:
        yield InvariantResult("push_point_degree", m.push_point.degree == 1,
                              f"deg f_*(o_C) = {m.push_point.degree}")
        bad = [lab for lab in s.labels(1) if _safe(lambda: _proj_formula_fails(ctx, lab))]
        yield InvariantResult("projection_formula", not bad,
                              f"f_*(f^*b) != b . f_*C for {bad}" if bad else "")
    for rule in ctx.opaque.values():
        yield from _validate_rule(ctx, rule)


def _safe(fn):
    try:
        return fn()
    except (ContextError, GradingError):
        return True


def _proj_formula_fails(ctx: GeometryContext, label: str) -> bool:
    b = basis_class(SURFACE, label)
    return ctx.f_push(ctx.f_pull(b)) != ctx.surface_mul(b, ctx.f_push(curve_fundamental()))


def _validate_rule(ctx: GeometryContext, rule: OpaqueRule):
    s, c = ctx.surface, ctx.curve
    bad = []
    for a in c.labels(1):
        for b in s.labels(1):
            lhs = ctx.surface_mul(ctx.mu_lower(rule.name, basis_class(CURVE, a)), basis_class(SURFACE, b)).degree
            rhs = basis_class(CURVE, a).degree * ctx.mu_upper(rule.name, basis_class(SURFACE, b)).coeff("C")
            if lhs != rhs:
                bad.append((a, b))
    for b in s.labels(2):
        lhs = ctx.mu_lower(rule.name, curve_fundamental()).coeff("S") * basis_class(SURFACE, b).degree
        rhs = ctx.mu_upper(rule.name, basis_class(SURFACE, b)).degree
        if lhs != rhs:
            bad.append(("C", b))
    yield InvariantResult(f"{rule.name}:degree_adjoint", not bad, f"mismatch at {bad}" if bad else "")
    if rule.role != "graph":
        return
    if ctx.morphism is None:
        yield InvariantResult(f"{rule.name}:graph_identities", False, "graph rule without a morphism")
        return
    xi = ctx.xi
    eta = ctx.eta
    yield InvariantResult(f"{rule.name}:kills_xi_squared",
                          ctx.mu_upper(rule.name, ctx.surface_mul(xi, xi)).is_zero(),
                          "mu^*(xi^2) != 0")
    yield InvariantResult(f"{rule.name}:kills_eta", ctx.mu_lower(rule.name, eta).is_zero(), "mu_*(eta) != 0")
    f_eta = ctx.f_push(eta)
    bad = []
    for a in c.labels(1):
        p = basis_class(CURVE, a)
        if ctx.f_push(p) - f_eta * p.degree != ctx.surface_mul(ctx.mu_lower(rule.name, p), xi):
            bad.append(a)
    yield InvariantResult(f"{rule.name}:albanese_identity", not bad,
                          f"f_*(p) - f_*eta != mu_*(p).xi for {bad}" if bad else "")
    bad = []
    for w in s.pic0:
        cls = basis_class(SURFACE, f"pic:{w}")
        if ctx.f_pull(cls) != ctx.mu_upper(rule.name, ctx.surface_mul(xi, cls)):
            bad.append(w)
    yield InvariantResult(f"{rule.name}:picard_identity", not bad,
                          f"f^*(w) != mu^*(xi.w) for {bad}" if bad else "")


__all__ = [
    "ContextError", "NormalizationError", "InvariantResult", "CurveData", "SurfaceData",
    "MorphismData", "OpaqueRule", "GeometryContext", "label_codim",
]
