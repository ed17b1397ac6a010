"""Projectors and retractions on the Chow groups of X = C x S.

All decompositions are relative to the polarizations xi on S and eta on C
(deg eta = 1).  The pieces are

* ``C(.)part``      C (.) alpha_*(eta)
* ``eta(.)part``    eta (.) alpha_*(C)
* ``mu-part``       alpha_mu . xi^(i-1), the rigid part
* ``pic0(.)xi^v``   (alpha^*(xi) - deg alpha^*(xi) . eta) (.) xi^dual
* ``ns0-part``      sum_i alpha^*(h_i) (.) h_i^dual over a basis of NS(S)_0
* ``biprimitive``   what survives all of the above in codim 2

Membership in a subgroup is decided syntactically, after the declared
rewrite rules; nothing here claims semantic equality in the Chow group.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .classes import (
    CURVE, POINT, SURFACE, FactorClass, GradingError, curve_fundamental, surface_fundamental,
)
from .context import ContextError, GeometryContext, NormalizationError
from .cycles import CycleExpr, opaque, reduce, tensor, upper, lower

C_PART = "C(.)part"
ETA_PART = "eta(.)part"
MU_PART = "mu-part"
PIC0_PART = "pic0(.)xi^v"
NS0_PART = "ns0-part"
BIPRIMITIVE = "biprimitive"
RIGID = "rigid"


class DecompositionError(ValueError):
    """An input outside the domain of a projector."""


@dataclass(frozen=True)
class DecompositionReport:
    input: CycleExpr
    components: dict[str, CycleExpr]
    residual: CycleExpr
    residual_name: str = "residual"
    overlaps: tuple[str, ...] = ()
    notes: tuple[str, ...] = field(default_factory=tuple)

    def total(self) -> CycleExpr:
        out = self.residual
        for comp in self.components.values():
            out = out + comp
        return out

    def is_complete(self, ctx: GeometryContext) -> bool:
        return reduce(self.total() - self.input, ctx).is_zero()

    def render(self) -> str:
        rows = [("component", "expression")]
        rows += [(name, str(expr)) for name, expr in self.components.items()]
        rows.append((self.residual_name, str(self.residual)))
        width = max(len(r[0]) for r in rows)
        lines = [f"{a.ljust(width)}  {b}" for a, b in rows]
        lines.insert(1, "-" * width + "  " + "-" * 10)
        if self.overlaps:
            lines.append(f"overlapping components: {', '.join(self.overlaps)}")
        lines.extend(f"note: {n}" for n in self.notes)
        return "\n".join(lines)

    def as_dict(self) -> dict:
        return {
            "input": str(self.input),
            "components": {k: str(v) for k, v in self.components.items()},
            self.residual_name: str(self.residual),
            "overlaps": list(self.overlaps),
        }


# ---- helpers ------------------------------------------------------------------

def homological(c: FactorClass) -> FactorClass:
    """The part of a factor class that survives in cohomology."""
    if c.codim == 0:
        return c
    if c.space == CURVE or c.codim == 2:
        return FactorClass.of(c.space, c.codim, {POINT: c.degree})
    return FactorClass.of(c.space, c.codim, {k: v for k, v in c.as_dict().items() if k.startswith("ns:")})


def _require_eta(ctx: GeometryContext) -> FactorClass:
    eta = ctx.eta
    if eta.degree != 1:
        raise NormalizationError(f"deg eta = {eta.degree}; normalize xi so that deg eta = 1")
    return eta


def _check_codim(alpha: CycleExpr, allowed=(1, 2)):
    if alpha.codim not in allowed:
        raise GradingError(f"expected codim in {allowed}, got {alpha.codim}")


def _xi_power(ctx: GeometryContext, k: int) -> FactorClass:
    if k == 0:
        return surface_fundamental()
    return ctx.xi if k == 1 else ctx.surface_mul(ctx.xi, ctx.xi)


def _rigid_expr(mu: dict[str, Fraction], ctx: GeometryContext, i: int) -> CycleExpr:
    out = CycleExpr.zero(i)
    for name, c in mu.items():
        out = out + opaque(name, b=_xi_power(ctx, i - 1)) * c
    return out


# ---- rigid part ---------------------------------------------------------------

def mu_coefficients(alpha: CycleExpr, ctx: GeometryContext) -> dict[str, Fraction]:
    """alpha_mu as a combination of the registered rigid generators.

    Tensor terms have no rigid part.  The graph contributes the registered
    ``graph_mu`` (or nothing when H^1(S) = 0).  An opaque term mu . (C (.) b)
    contributes c . mu when the cohomology class of b is c . xi; other opaque
    terms of codim 2 are homologically trivial in the rigid summand.
    """
    _check_codim(alpha)
    xi_ns = ctx.xi.ns_part()
    out: dict[str, Fraction] = {}
    per_rule: dict[str, FactorClass] = {}
    for term, c in alpha.terms:
        kind = term[0]
        if kind == "T":
            continue
        if kind == "G":
            if term[1] != "C":
                continue  # (id,f)_* of a point sits in codim 3
            if ctx.graph_mu is not None:
                out[ctx.graph_mu] = out.get(ctx.graph_mu, 0) + c
            elif not ctx.surface.h1_zero:
                raise ContextError("graph of f has a rigid part but no mu rule table is registered")
            continue
        name, a_label, b_label = term[1], term[2], term[3]
        ctx.rule(name)
        if alpha.codim == 1:
            out[name] = out.get(name, 0) + c
        elif a_label == "C" and b_label.startswith("ns:"):
            acc = per_rule.get(name, FactorClass.zero(SURFACE, 1))
            per_rule[name] = acc + FactorClass.of(SURFACE, 1, {b_label: c})
    for name, b in per_rule.items():
        ratio = _proportional(b.ns_part(), xi_ns)
        if ratio is None:
            raise DecompositionError(
                f"rigid part {name}.(C (.) {b}) is not a multiple of {name}.xi; "
                "the inverse polarization for this class is not registered"
            )
        out[name] = out.get(name, 0) + ratio
    return {k: v for k, v in out.items() if v != 0}


def _proportional(v: dict, w: dict) -> Fraction | None:
    if not w:
        return None if v else Fraction(0)
    pivot = next(iter(w))
    ratio = Fraction(v.get(pivot, 0)) / w[pivot]
    keys = set(v) | set(w)
    return ratio if all(v.get(k, 0) == ratio * w.get(k, 0) for k in keys) else None


def mu_of(alpha: CycleExpr, ctx: GeometryContext) -> CycleExpr:
    """The rigidified divisor alpha_mu, as a codim-1 expression."""
    return _rigid_expr(mu_coefficients(alpha, ctx), ctx, 1)


# ---- projections --------------------------------------------------------------

def _pieces(alpha: CycleExpr, ctx: GeometryContext, homological_only: bool):
    eta = _require_eta(ctx)
    lo_eta = lower(alpha, eta, ctx)
    lo_c = lower(alpha, curve_fundamental(), ctx)
    if homological_only:
        lo_eta, lo_c = homological(lo_eta), homological(lo_c)
    comps = {
        C_PART: tensor(curve_fundamental(), lo_eta),
        ETA_PART: tensor(eta, lo_c),
        MU_PART: _rigid_expr(mu_coefficients(alpha, ctx), ctx, alpha.codim),
    }
    return comps


def project_A(alpha: CycleExpr, i: int, ctx: GeometryContext, check: bool = True) -> DecompositionReport:
    """Decomposition of the cohomology class: rigid + C (.) A^i(S) + eta (.) A^(i-1)(S).

    The residual is homologically trivial.
    """
    if alpha.codim != i:
        raise GradingError(f"alpha has codim {alpha.codim}, not {i}")
    _check_codim(alpha)
    comps = _pieces(alpha, ctx, homological_only=True)
    comps[RIGID] = comps.pop(MU_PART)
    residual = alpha - sum(comps.values(), CycleExpr.zero(i))
    return _finish(alpha, comps, residual, "residual", ctx, lambda x: project_A(x, i, ctx, False), check)


def project_ch(alpha: CycleExpr, i: int, ctx: GeometryContext, check: bool = True) -> DecompositionReport:
    """Ch^i(X) = Ch^i(X)^0 + C (.) Ch^i(S) + eta (.) Ch^(i-1)(S) + Ch^1(X)_rig xi^(i-1)."""
    if alpha.codim != i:
        raise GradingError(f"alpha has codim {alpha.codim}, not {i}")
    _check_codim(alpha)
    comps = _pieces(alpha, ctx, homological_only=False)
    residual = alpha - sum(comps.values(), CycleExpr.zero(i))
    return _finish(alpha, comps, residual, "homologically-trivial", ctx, lambda x: project_ch(x, i, ctx, False), check)


def _pic0_piece(alpha: CycleExpr, ctx: GeometryContext) -> CycleExpr:
    up = upper(alpha, ctx.xi, ctx)
    return tensor(up - ctx.eta * up.degree, ctx.xi_dual)


def decompose(alpha: CycleExpr, ctx: GeometryContext, check: bool = True) -> DecompositionReport:
    """Split a codim-2 class into its four rigid pieces and the bi-primitive retraction."""
    _check_codim(alpha, (2,))
    comps = _pieces(alpha, ctx, homological_only=False)
    comps[PIC0_PART] = _pic0_piece(alpha, ctx)
    residual = alpha - sum(comps.values(), CycleExpr.zero(2))
    return _finish(alpha, comps, residual, BIPRIMITIVE, ctx, lambda x: decompose(x, ctx, False), check)


def retract_biprimitive(alpha: CycleExpr, ctx: GeometryContext) -> CycleExpr:
    """alpha - C(.)alpha_*eta - eta(.)alpha_*C - alpha_mu xi - (alpha^*xi - deg.eta)(.)xi^v."""
    return decompose(alpha, ctx, check=False).residual


def decompose_j2(alpha: CycleExpr, ctx: GeometryContext, check: bool = True) -> DecompositionReport:
    """J^2(X) = J^2_00 + C (.) Alb(S) + eta (.) Pic^0(S) + Pic^0(C) (.) xi^v.

    Only defined on homologically trivial classes.
    """
    _check_codim(alpha, (2,))
    if not is_homologically_trivial(alpha, ctx):
        raise DecompositionError("J^2 decomposition needs a homologically trivial class")
    eta = _require_eta(ctx)
    comps = {
        C_PART: tensor(curve_fundamental(), lower(alpha, eta, ctx)),
        ETA_PART: tensor(eta, lower(alpha, curve_fundamental(), ctx)),
        PIC0_PART: tensor(upper(alpha, ctx.xi, ctx), ctx.xi_dual),
    }
    residual = alpha - sum(comps.values(), CycleExpr.zero(2))
    return _finish(alpha, comps, residual, BIPRIMITIVE, ctx, lambda x: decompose_j2(x, ctx, False), check)


def _finish(alpha, comps, residual, residual_name, ctx, project, check) -> DecompositionReport:
    overlaps = tuple(sorted(_overlapping(comps, ctx, project))) if check else ()
    return DecompositionReport(alpha, comps, residual, residual_name, overlaps)


def _overlapping(comps, ctx, project):
    """Components whose re-projection leaks into another component."""
    out = set()
    for name, expr in comps.items():
        if expr.is_zero():
            continue
        for other, val in project(expr).components.items():
            expected = expr if other == name else CycleExpr.zero(expr.codim)
            if not reduce(val - expected, ctx).is_zero():
                out.add(name)
                out.add(other)
    return out


# ---- membership tests ---------------------------------------------------------

def is_homologically_trivial(alpha: CycleExpr, ctx: GeometryContext) -> bool:
    """True when every summand of the cohomological decomposition vanishes."""
    rep = project_A(alpha, alpha.codim, ctx, check=False)
    return all(reduce(c, ctx).is_zero() for c in rep.components.values())


@dataclass(frozen=True)
class BiprimitivityResult:
    upper_xi: FactorClass
    lower_eta: FactorClass
    lower_C: FactorClass
    homologically_trivial: bool

    @property
    def passed(self) -> bool:
        return (self.upper_xi.is_zero() and self.lower_eta.is_zero() and self.lower_C.is_zero()
                and self.homologically_trivial)

    def __bool__(self) -> bool:
        return self.passed

    def as_dict(self) -> dict:
        return {
            "alpha^*(xi)": str(self.upper_xi),
            "alpha_*(eta)": str(self.lower_eta),
            "alpha_*(C)": str(self.lower_C),
            "homologically_trivial": self.homologically_trivial,
            "passed": self.passed,
        }


def biprimitivity_test(alpha: CycleExpr, ctx: GeometryContext) -> BiprimitivityResult:
    """Evaluate alpha^*(xi), alpha_*(eta) and alpha_*(C) after the J^2 rewrite."""
    _check_codim(alpha, (2,))
    alpha = reduce(alpha, ctx, j2=True)
    return BiprimitivityResult(
        upper_xi=upper(alpha, ctx.xi, ctx),
        lower_eta=lower(alpha, ctx.eta, ctx),
        lower_C=lower(alpha, curve_fundamental(), ctx),
        homologically_trivial=is_homologically_trivial(alpha, ctx),
    )


# ---- NS(S)_0 ------------------------------------------------------------------

def _ns_vector(ctx: GeometryContext, h: FactorClass) -> list[Fraction]:
    return [h.coeff(f"ns:{n}") for n in ctx.surface.ns]


def ns0_basis(ctx: GeometryContext) -> list[FactorClass]:
    """A rational basis of the xi-orthogonal complement in NS(S)."""
    s = ctx.surface
    row = linalg.matvec(s.ns_gram, _ns_vector(ctx, ctx.xi))
    pivot = next(k for k, x in enumerate(row) if x != 0)
    basis = []
    for k in range(len(s.ns)):
        if k == pivot:
            continue
        vec = [Fraction(0)] * len(s.ns)
        vec[k] = Fraction(1)
        vec[pivot] = -row[k] / row[pivot]
        basis.append(FactorClass.of(SURFACE, 1, {f"ns:{n}": v for n, v in zip(s.ns, vec)}))
    return basis


def dual_basis(ctx: GeometryContext, basis: list[FactorClass]) -> list[FactorClass]:
    """h_j^dual in the span of the basis with <h_i, h_j^dual> = delta_ij."""
    gram = [[ctx.ns_pair(a, b) for b in basis] for a in basis]
    try:
        ginv = linalg.inverse(gram)
    except ZeroDivisionError:
        raise DecompositionError("NS Gram matrix restricted to the given basis is degenerate") from None
    duals = []
    for j in range(len(basis)):
        d = FactorClass.zero(SURFACE, 1)
        for k, h in enumerate(basis):
            d = d + h * ginv[k][j]
        duals.append(d)
    return duals


def project_ns0(alpha: CycleExpr, ctx: GeometryContext, basis: list[FactorClass] | None = None,
                check: bool = True) -> DecompositionReport:
    """J^2_00 = J^2_000 + Pic^0(C) (.) NS(S)_0, projecting by sum_i alpha^*(h_i) (.) h_i^dual."""
    _check_codim(alpha, (2,))
    basis = ns0_basis(ctx) if basis is None else list(basis)
    for h in basis:
        if h.space != SURFACE or h.codim != 1 or h.trivial_part():
            raise DecompositionError(f"{h} is not a Neron-Severi class")
        if ctx.ns_pair(h, ctx.xi) != 0:
            raise DecompositionError(f"basis element {h} is not orthogonal to xi")
    duals = dual_basis(ctx, basis)
    part = CycleExpr.zero(2)
    for h, hd in zip(basis, duals):
        part = part + tensor(upper(alpha, h, ctx), hd)
    comps = {NS0_PART: part}
    return _finish(alpha, comps, alpha - part, "J2_000", ctx,
                   lambda x: project_ns0(x, ctx, basis, False), check)


# ---- functoriality ------------------------------------------------------------

def product_pullback(alpha: CycleExpr, curve_map: dict[str, FactorClass],
                     surface_map: dict[str, FactorClass]) -> CycleExpr:
    """(f_C x f_S)^* on tensor expressions.

    ``curve_map`` and ``surface_map`` give f_C^* and f_S^* on basis labels;
    fundamental classes pull back to fundamental classes.
    """
    from .classes import basis_class

    def pull(space, label, table):
        if label in ("C", "S"):
            return basis_class(space, label)
        try:
            return table[label]
        except KeyError:
            raise ContextError(f"pullback not given on {label}") from None

    out = CycleExpr.zero(alpha.codim)
    for term, c in alpha.terms:
        if term[0] != "T":
            raise DecompositionError("product pullback is only tabulated on tensor terms")
        out = out + tensor(pull(CURVE, term[1], curve_map), pull(SURFACE, term[2], surface_map)) * c
    return out
