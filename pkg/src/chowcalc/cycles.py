"""Formal cycles on X = C x S and the intersection-rule engine.

A :class:`CycleExpr` is a rational combination of primitive terms, each
expanded down to basis labels (see :mod:`chowcalc.classes`):

* ``("T", a, b)``        the class a (.) b = pi_C^* a . pi_S^* b
* ``("G", c)``           (id, f)_* c; ``("G", "C")`` is the graph of f
* ``("O", mu, a, b)``    mu . (a (.) b) for an opaque codim-1 generator mu

Because every term is expanded in a basis, two expressions are equal exactly
when their term maps agree.  Products the rule table does not cover raise
:class:`PartialProductError` instead of guessing.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from .classes import (
    CURVE, POINT, SURFACE, FactorClass, GradingError, basis_class, curve_fundamental,
    is_trivial_label, label_codim, surface_fundamental,
)
from .context import ContextError, GeometryContext
from .linalg import Q, fmt, inverse

Term = tuple


class PartialProductError(ArithmeticError):
    """No rule in the table evaluates this product."""

    def __init__(self, left: Term, right: Term):
        super().__init__(f"partial product: no rule for {_term_str(left)} . {_term_str(right)}")
        self.pair = (left, right)


def term_codim(term: Term) -> int:
    kind = term[0]
    if kind == "T":
        return label_codim(CURVE, term[1]) + label_codim(SURFACE, term[2])
    if kind == "G":
        return 2 + label_codim(CURVE, term[1])
    if kind == "O":
        return 1 + label_codim(CURVE, term[2]) + label_codim(SURFACE, term[3])
    raise GradingError(f"unknown term kind {kind!r}")


def _label_str(space, label):
    return f"[{space}]" if label in ("C", "S") else label


def _term_str(term: Term) -> str:
    kind = term[0]
    if kind == "T":
        return f"{_label_str('C', term[1])}(.){_label_str('S', term[2])}"
    if kind == "G":
        return "Gamma" if term[1] == "C" else f"Gamma_*({term[1]})"
    if term[2] == "C" and term[3] == "S":
        return term[1]
    return f"{term[1]}.({_label_str('C', term[2])}(.){_label_str('S', term[3])})"


@dataclass(frozen=True)
class CycleExpr:
    codim: int
    terms: tuple[tuple[Term, Fraction], ...] = ()

    def __post_init__(self):
        if not 0 <= self.codim <= 3:
            raise GradingError(f"codim {self.codim} out of range on X")
        for term, _ in self.terms:
            if term_codim(term) != self.codim:
                raise GradingError(f"term {_term_str(term)} is not of codim {self.codim}")

    @classmethod
    def build(cls, codim: int, items: Iterable[tuple[Term, Fraction]]) -> "CycleExpr":
        acc: dict[Term, Fraction] = {}
        for term, c in items:
            acc[term] = acc.get(term, Fraction(0)) + Q(c)
        return cls(codim, tuple(sorted((t, c) for t, c in acc.items() if c != 0)))

    @classmethod
    def zero(cls, codim: int) -> "CycleExpr":
        return cls(codim)

    def __iter__(self) -> Iterator[tuple[Term, Fraction]]:
        return iter(self.terms)

    def as_dict(self) -> dict[Term, Fraction]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        if not isinstance(other, CycleExpr):
            return NotImplemented
        if other.codim != self.codim:
            raise GradingError(f"cannot add codim {self.codim} and codim {other.codim} cycles")
        return CycleExpr.build(self.codim, self.terms + other.terms)

    def __neg__(self):
        return CycleExpr(self.codim, tuple((t, -c) for t, c in self.terms))

    def __sub__(self, other):
        if not isinstance(other, CycleExpr):
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar):
        if isinstance(scalar, CycleExpr):
            return NotImplemented
        s = Q(scalar)
        return CycleExpr.build(self.codim, ((t, c * s) for t, c in self.terms))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1 / Q(scalar))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = [(_term_str(t) if c == 1 else f"{fmt(c)}*{_term_str(t)}") for t, c in self.terms]
        return " + ".join(parts).replace("+ -", "- ")


# ---- constructors -------------------------------------------------------------

def tensor(a: FactorClass, b: FactorClass) -> CycleExpr:
    """a (.) b = pi_C^* a . pi_S^* b, expanded bilinearly."""
    if a.space != CURVE or b.space != SURFACE:
        raise GradingError("tensor needs a curve class and a surface class")
    codim = a.codim + b.codim
    if codim > 3:
        raise GradingError(f"tensor codim {codim} exceeds dim X = 3")
    return CycleExpr.build(codim, ((("T", la, lb), ca * cb) for la, ca in a.terms for lb, cb in b.terms))


def graph(c: FactorClass | None = None) -> CycleExpr:
    """(id, f)_* c; with no argument, the graph Gamma of f."""
    c = curve_fundamental() if c is None else c
    return CycleExpr.build(2 + c.codim, ((("G", la), ca) for la, ca in c.terms))


def opaque(name: str, a: FactorClass | None = None, b: FactorClass | None = None) -> CycleExpr:
    a = curve_fundamental() if a is None else a
    b = surface_fundamental() if b is None else b
    codim = 1 + a.codim + b.codim
    if codim > 3:
        raise GradingError(f"opaque product codim {codim} exceeds 3")
    return CycleExpr.build(codim, ((("O", name, la, lb), ca * cb) for la, ca in a.terms for lb, cb in b.terms))


def pullback_C(a: FactorClass) -> CycleExpr:
    return tensor(a, surface_fundamental())


def pullback_S(b: FactorClass) -> CycleExpr:
    return tensor(curve_fundamental(), b)


# ---- intersection -------------------------------------------------------------

def _tensor_of(ctx: GeometryContext, a: FactorClass | None, b: FactorClass | None, kind="T", name=None):
    if a is None or b is None:
        return []
    if kind == "T":
        return [(("T", la, lb), ca * cb) for la, ca in a.terms for lb, cb in b.terms]
    return [(("O", name, la, lb), ca * cb) for la, ca in a.terms for lb, cb in b.terms]


def _intersect_terms(s: Term, t: Term, ctx: GeometryContext) -> list[tuple[Term, Fraction]]:
    if s[0] == "T" and t[0] != "T":
        s, t = t, s
    if s[0] == "T" and t[0] == "T":
        a = ctx.curve_mul(basis_class(CURVE, s[1]), basis_class(CURVE, t[1]))
        b = ctx.surface_mul(basis_class(SURFACE, s[2]), basis_class(SURFACE, t[2]))
        return _tensor_of(ctx, a, b)
    if t[0] != "T":
        # graph.graph needs excess intersection; opaque.opaque and graph.opaque have no rule
        raise PartialProductError(s, t)
    a_t, b_t = basis_class(CURVE, t[1]), basis_class(SURFACE, t[2])
    if s[0] == "G":
        pulled = ctx.f_pull(b_t)
        if pulled is None:
            return []
        c = ctx.curve_mul(basis_class(CURVE, s[1]), a_t)
        c = None if c is None else ctx.curve_mul(c, pulled)
        return [] if c is None else [(("G", lab), co) for lab, co in c.terms]
    # opaque
    ctx.rule(s[1])
    a = ctx.curve_mul(basis_class(CURVE, s[2]), a_t)
    b = ctx.surface_mul(basis_class(SURFACE, s[3]), b_t)
    return _tensor_of(ctx, a, b, kind="O", name=s[1])


def intersect(x: CycleExpr, y: CycleExpr, ctx: GeometryContext) -> CycleExpr:
    codim = x.codim + y.codim
    if codim > 3:
        raise GradingError(f"product codim {codim} exceeds dim X = 3")
    items = []
    for s, cs in x.terms:
        for t, ct in y.terms:
            items.extend((term, c * cs * ct) for term, c in _intersect_terms(s, t, ctx))
    return CycleExpr.build(codim, items)


# ---- pushforwards -------------------------------------------------------------

def _push_S_term(term: Term, ctx: GeometryContext) -> FactorClass | None:
    kind = term[0]
    if kind == "T":
        a = basis_class(CURVE, term[1])
        return basis_class(SURFACE, term[2]) * (a.degree if a.codim == 1 else 0)
    if kind == "G":
        return ctx.f_push_label(term[1])
    mu_a = ctx.mu_lower(term[1], basis_class(CURVE, term[2]))
    return ctx.surface_mul(mu_a, basis_class(SURFACE, term[3]))


def push_S(x: CycleExpr, ctx: GeometryContext) -> FactorClass:
    """pi_S*: codim i on X to codim i-1 on S."""
    if x.codim < 1:
        raise GradingError("pi_S* of a codim-0 cycle has negative codimension")
    out = FactorClass.zero(SURFACE, x.codim - 1)
    for term, c in x.terms:
        img = _push_S_term(term, ctx)
        if img is not None and not img.is_zero():
            out = out + img * c
    return out


def _push_C_term(term: Term, ctx: GeometryContext) -> FactorClass | None:
    kind = term[0]
    if kind == "T":
        b = basis_class(SURFACE, term[2])
        return basis_class(CURVE, term[1]) * (b.degree if b.codim == 2 else 0)
    if kind == "G":
        return basis_class(CURVE, term[1])
    mu_b = ctx.mu_upper(term[1], basis_class(SURFACE, term[3]))
    if mu_b is None:
        return None
    return ctx.curve_mul(basis_class(CURVE, term[2]), mu_b)


def push_C(x: CycleExpr, ctx: GeometryContext) -> FactorClass | None:
    """pi_C*: codim i on X to codim i-2 on C; ``None`` below codim 2."""
    if x.codim < 2:
        return None
    out = FactorClass.zero(CURVE, x.codim - 2)
    for term, c in x.terms:
        img = _push_C_term(term, ctx)
        if img is not None and not img.is_zero():
            out = out + img * c
    return out


def correspondence_apply(alpha: CycleExpr, arg: FactorClass, direction: str,
                         ctx: GeometryContext) -> FactorClass | None:
    """alpha_*(arg) = pi_S*(alpha . pi_C^* arg) or alpha^*(arg) = pi_C*(alpha . pi_S^* arg)."""
    if direction == "lower":
        if arg.space != CURVE:
            raise GradingError("alpha_* takes a curve class")
        if alpha.codim + arg.codim > 3:
            return None
        return push_S(intersect(alpha, pullback_C(arg), ctx), ctx)
    if direction == "upper":
        if arg.space != SURFACE:
            raise GradingError("alpha^* takes a surface class")
        if alpha.codim + arg.codim > 3:
            return None
        return push_C(intersect(alpha, pullback_S(arg), ctx), ctx)
    raise ValueError(f"direction must be 'lower' or 'upper', not {direction!r}")


def lower(alpha: CycleExpr, arg: FactorClass, ctx: GeometryContext) -> FactorClass | None:
    return correspondence_apply(alpha, arg, "lower", ctx)


def upper(alpha: CycleExpr, arg: FactorClass, ctx: GeometryContext) -> FactorClass | None:
    return correspondence_apply(alpha, arg, "upper", ctx)


def degree(x: CycleExpr, ctx: GeometryContext) -> Fraction:
    """Degree of a zero-cycle on X."""
    if x.codim != 3:
        raise GradingError(f"degree needs a zero-cycle, got codim {x.codim}")
    return push_S(x, ctx).degree


def degree_via_C(x: CycleExpr, ctx: GeometryContext) -> Fraction:
    """The same degree computed through pi_C*; used as a consistency route."""
    if x.codim != 3:
        raise GradingError(f"degree needs a zero-cycle, got codim {x.codim}")
    return push_C(x, ctx).degree


def albanese(x: CycleExpr, ctx: GeometryContext) -> tuple[dict, dict]:
    """AJ image of a zero-cycle in Alb(C) x Alb(S)."""
    if x.codim != 3:
        raise GradingError("Albanese image needs a zero-cycle")
    return push_C(x, ctx).trivial_part(), push_S(x, ctx).trivial_part()


# ---- rewrite rules ------------------------------------------------------------

def diagonal_decomposition(ctx: GeometryContext) -> CycleExpr:
    """Gamma = C (.) o_S + sum_k f^*n_k (.) n_k^dual on a surface whose diagonal decomposes."""
    s = ctx.surface
    if not s.chow_trivial:
        raise ContextError("the diagonal of S is not declared decomposable")
    ginv = inverse(s.ns_gram)
    out = tensor(curve_fundamental(), basis_class(SURFACE, POINT))
    for k, nk in enumerate(s.ns):
        dual = FactorClass.of(SURFACE, 1, {f"ns:{m}": ginv[j][k] for j, m in enumerate(s.ns)})
        out = out + tensor(ctx.f_pull(basis_class(SURFACE, f"ns:{nk}")), dual)
    return out


def reduce(x: CycleExpr, ctx: GeometryContext, j2: bool = False) -> CycleExpr:
    """Apply the registered rewrite rules.

    * graph terms are expanded through the diagonal decomposition when S allows it;
    * with ``j2=True``, products of two homologically trivial divisors are dropped
      (they are zero in J^2(X)).
    """
    items = []
    decomposed = None
    for term, c in x.terms:
        if term[0] == "G" and ctx.surface.chow_trivial:
            if decomposed is None:
                decomposed = diagonal_decomposition(ctx)
            expanded = intersect(decomposed, pullback_C(basis_class(CURVE, term[1])), ctx)
            items.extend((t, cc * c) for t, cc in expanded.terms)
            continue
        if j2 and x.codim == 2 and term[0] == "T" and is_trivial_label(term[1]) \
                and is_trivial_label(term[2]):
            continue
        items.append((term, c))
    return CycleExpr.build(x.codim, items)


def equal_mod_rules(x: CycleExpr, y: CycleExpr, ctx: GeometryContext, j2: bool = True) -> bool:
    return reduce(x - y, ctx, j2=j2).is_zero()
