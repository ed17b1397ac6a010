"""Arithmetic diagonals and their height calculus.

For f: C -> S with deg f^*xi = 1 the arithmetic diagonal is

    gamma = Gamma - C (.) f_*eta - eta (.) f_*C - mu_f . xi,

which is bi-primitive.  When H^1(S) = 0 the family gamma_e (deg e = 1)
is available and its heights differ by an explicit Neron-Tate quadratic form.
"""

from __future__ import annotations

from fractions import Fraction

from . import linalg
from .classes import CURVE, FactorClass, GradingError, curve_fundamental
from .context import ContextError, GeometryContext, NormalizationError
from .cycles import CycleExpr, graph, opaque, reduce, tensor, upper
from .decompositions import DecompositionError, dual_basis, ns0_basis


class PairingError(ArithmeticError):
    """The height-pairing axioms do not determine this pairing."""


def _check_degree_one(e: FactorClass, what: str):
    if e.space != CURVE or e.codim != 1:
        raise GradingError(f"{what} must be a divisor on C")
    if e.degree != 1:
        raise NormalizationError(f"deg {what} = {e.degree}, expected 1")


def arithmetic_diagonal(ctx: GeometryContext, rewrite: bool = True) -> CycleExpr:
    """Gamma - C (.) f_*eta - eta (.) f_*C - mu_f . xi."""
    m = ctx.require_morphism()
    eta = ctx.eta
    _check_degree_one(eta, "eta = f^*xi")
    if m.gross_schoen_vanishing:
        return CycleExpr.zero(2)
    if ctx.graph_mu is None and not ctx.surface.h1_zero:
        raise ContextError("H^1(S) != 0 and no mu_f rule table is registered")
    gamma = graph() - tensor(curve_fundamental(), ctx.f_push(eta)) - tensor(eta, ctx.f_push(curve_fundamental()))
    if ctx.graph_mu is not None:
        gamma = gamma - opaque(ctx.graph_mu, b=ctx.xi)
    return reduce(gamma, ctx) if rewrite else gamma


def gamma_e(e: FactorClass, ctx: GeometryContext, rewrite: bool = True) -> CycleExpr:
    """Gamma - C (.) f_*e - e (.) f_*C; only meaningful when H^1(S) = 0."""
    ctx.require_morphism()
    if not ctx.surface.h1_zero:
        raise ContextError("gamma_e needs H^1(S) = 0")
    _check_degree_one(e, "e")
    out = graph() - tensor(curve_fundamental(), ctx.f_push(e)) - tensor(e, ctx.f_push(curve_fundamental()))
    return reduce(out, ctx) if rewrite else out


# ---- the height pairing on tensor expressions ------------------------------------

def _blocks(x: CycleExpr, ctx: GeometryContext):
    x = reduce(x, ctx, j2=True)
    if x.codim != 2:
        raise GradingError("the height pairing is taken on codim-2 classes")
    pic_ns: dict[str, FactorClass] = {}
    other = []
    for term, c in x.terms:
        if term[0] == "T" and term[1].startswith("pic:") and term[2].startswith("ns:"):
            v = pic_ns.get(term[2], FactorClass.zero(CURVE, 1))
            pic_ns[term[2]] = v + FactorClass.of(CURVE, 1, {term[1]: c})
        elif term[0] == "T" and term[1] == "C" and term[2].startswith("alb:"):
            other.append(("C(.)alb", term, c))
        else:
            other.append(("unknown", term, c))
    return pic_ns, other


def height_pairing(x: CycleExpr, y: CycleExpr, ctx: GeometryContext, nt_gram=None):
    """<x, y>_B from the pairing axioms.

    On Pic^0(C) (.) NS(S) the pairing is -<n, n'>_NS <v, v'>_NT; products of two
    homologically trivial divisors pair to zero, and C (.) Alb(S) is orthogonal to
    Pic^0(C) (.) NS(S).  Anything else is not determined by the axioms.
    ``nt_gram`` may carry symbolic entries.
    """
    bx, ox = _blocks(x, ctx)
    by, oy = _blocks(y, ctx)
    for kind, term, _ in ox + oy:
        if kind == "unknown":
            raise PairingError(f"the pairing axioms do not cover the term {term}")
    if (ox and oy):
        raise PairingError("pairing between two C (.) Alb(S) classes is not determined by the axioms")
    total = 0
    for nx, vx in bx.items():
        for ny, vy in by.items():
            ns = ctx.label_product(nx, ny).degree
            if ns:
                total = total - ns * ctx.nt_pair(vx, vy, nt_gram)
    return total


# ---- height differences in the gamma_e family -----------------------------------

def _nt(ctx, a, b, gram):
    return ctx.nt_pair(a, b, gram)


def height_difference(e1: FactorClass, e2: FactorClass, phi: FactorClass, d, ctx: GeometryContext,
                      nt_gram=None):
    """<gamma_e2, gamma_e2> - <gamma_e1, gamma_e1>.

    Equal to -2 <phi - d e1, e1 - e2>_NT - d <e1 - e2, e1 - e2>_NT with
    phi = f^*f_*C of degree d.
    """
    _check_degree_one(e1, "e1")
    _check_degree_one(e2, "e2")
    if phi.space != CURVE or phi.codim != 1 or phi.degree != d:
        raise GradingError(f"deg phi = {phi.degree} does not match d = {d}")
    diff = e1 - e2
    return -2 * _nt(ctx, phi - e1 * d, diff, nt_gram) - d * _nt(ctx, diff, diff, nt_gram)


def height_difference_via_cycles(e1: FactorClass, e2: FactorClass, ctx: GeometryContext, nt_gram=None):
    """The same offset with gamma_e1^*(f_*C) evaluated by the cycle engine."""
    _check_degree_one(e1, "e1")
    _check_degree_one(e2, "e2")
    fc = ctx.f_push(curve_fundamental())
    pulled = upper(gamma_e(e1, ctx, rewrite=False), fc, ctx)
    d = ctx.ns_pair(fc, fc)
    diff = e1 - e2
    return -2 * _nt(ctx, pulled, diff, nt_gram) - d * _nt(ctx, diff, diff, nt_gram)


def phi_and_d(ctx: GeometryContext) -> tuple[FactorClass, Fraction]:
    """phi = f^*f_*C and d = deg phi."""
    phi = ctx.f_pull(ctx.f_push(curve_fundamental()))
    return phi, phi.degree


def optimal_e(phi: FactorClass, d) -> FactorClass:
    """e_0 = phi / d, the extremum of e -> <gamma_e, gamma_e>."""
    if d == 0:
        raise ZeroDivisionError("d = 0: the height of gamma_e has no isolated extremum")
    if phi.degree != d:
        raise GradingError(f"deg phi = {phi.degree} does not match d = {d}")
    return phi / d


def hodge_lower_bound(ctx: GeometryContext, basis: list[FactorClass] | None = None, nt_gram=None):
    """Sum of <f_eta^*h_i, f_eta^*h_i>_NT over an orthonormal basis of NS(S)_0.

    Computed basis-free as -sum_ij (G^-1)_ij <f_eta^*h_i, f_eta^*h_j>_NT with
    G the NS Gram matrix of ``basis`` and f_eta^*h = f^*h - deg(f^*h) eta.
    """
    ctx.require_morphism()
    eta = ctx.eta
    _check_degree_one(eta, "eta")
    basis = ns0_basis(ctx) if basis is None else list(basis)
    for h in basis:
        if ctx.ns_pair(h, ctx.xi) != 0:
            raise DecompositionError(f"basis element {h} is not orthogonal to xi")
    gram = [[ctx.ns_pair(a, b) for b in basis] for a in basis]
    if basis and not linalg.is_negative_definite(gram):
        raise DecompositionError("NS Gram matrix on NS(S)_0 is not negative definite")
    if not basis:
        return Fraction(0)
    ginv = linalg.inverse(gram)
    pulled = []
    for h in basis:
        fh = ctx.f_pull(h)
        pulled.append(fh - eta * fh.degree)
    total = 0
    for i, a in enumerate(pulled):
        for j, b in enumerate(pulled):
            if ginv[i][j]:
                total = total - ginv[i][j] * ctx.nt_pair(a, b, nt_gram)
    return total


def ns0_projection_of_gamma(ctx: GeometryContext, basis: list[FactorClass] | None = None) -> CycleExpr:
    """sum_i f_eta^*h_i (.) h_i^dual, the formula for the NS(S)_0 projection of gamma."""
    eta = ctx.eta
    basis = ns0_basis(ctx) if basis is None else list(basis)
    out = CycleExpr.zero(2)
    for h, hd in zip(basis, dual_basis(ctx, basis)):
        fh = ctx.f_pull(h)
        out = out + tensor(fh - eta * fh.degree, hd)
    return out


# ---- the triple product -------------------------------------------------------

def x_e(e: FactorClass, canonical: FactorClass, genus: int) -> FactorClass:
    """e - K / (2g - 2), a degree-0 divisor when deg e = 1."""
    if genus < 2:
        raise ValueError("x_e needs genus >= 2")
    return e - canonical / (2 * genus - 2)


def gross_schoen_height(genus: int, omega_sq, nt_xe, local_sum=0):
    """(2g+2)/(2g-2) omega^2 + <x_e, x_e>_NT + sum_v phi(X_v) log N(v).

    Returns ``(value, note)``.  For g <= 1 the modified diagonal vanishes
    and the value is 0.  All inputs are opaque; no local analysis happens here.
    """
    if genus <= 1:
        return Fraction(0), "gamma = 0 for rational or elliptic curves"
    g = Fraction(genus)
    return (2 * g + 2) / (2 * g - 2) * omega_sq + nt_xe + local_sum, ""
