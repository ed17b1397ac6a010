"""Shared random generators for the test suite."""

import random
from fractions import Fraction

from chowcalc import corpus
from chowcalc.classes import CURVE, SURFACE, basis_class
from chowcalc.cycles import CycleExpr, graph, opaque, reduce, tensor


def contexts():
    return {
        "p2_4": corpus.plane_curve(4),
        "p1xp1_2_3": corpus.p1xp1_curve(2, 3),
        "p1xp1_5_2": corpus.p1xp1_curve(5, 2),
        "triple_2": corpus.triple_product(2),
        "triple_3": corpus.triple_product(3, Fraction(1, 3), Fraction(2, 3), v_e=(1, 0)),
        "k3": corpus.k3_lattice(),
        "rank2": corpus.rank_two_lattice(),
    }


def rational(rng, size=5, den=4):
    return Fraction(rng.randint(-size, size), rng.randint(1, den))


def random_cycle(rng: random.Random, ctx, terms=4) -> CycleExpr:
    """A random codim-2 combination of tensors, the graph and (if present) mu_f . xi."""
    out = graph() * rational(rng)
    for _ in range(terms):
        c = rng.randint(0, 1)
        a = rng.choice(ctx.curve.labels(c))
        b = rng.choice(ctx.surface.labels(2 - c))
        out = out + tensor(basis_class(CURVE, a), basis_class(SURFACE, b)) * rational(rng)
    if ctx.graph_mu is not None:
        out = out + opaque(ctx.graph_mu, b=ctx.xi) * rational(rng)
    return out


def projector_failure(project, x, ctx, j2=False):
    """None when ``project`` splits ``x`` completely and every component is fixed; else a message."""
    def same(a, b):
        return reduce(a - b, ctx, j2=j2).is_zero()

    zero = CycleExpr.zero(x.codim)
    rep = project(x)
    if not same(rep.total(), x):
        return "components do not add up to the input"
    for name, comp in rep.components.items():
        again = project(comp)
        if not same(again.components[name], comp):
            return f"{name} is not fixed"
        for other, piece in again.components.items():
            if other != name and not same(piece, zero):
                return f"{name} leaks into {other}"
    for name, piece in project(rep.residual).components.items():
        if not same(piece, zero):
            return f"residual leaks into {name}"
    if rep.overlaps:
        return f"overlaps {rep.overlaps}"
    return None
