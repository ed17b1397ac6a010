import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chowcalc import corpus
from chowcalc.classes import CURVE, SURFACE, GradingError, basis_class, curve_fundamental, surface_divisor
from chowcalc.cycles import (CycleExpr, PartialProductError, degree, graph, intersect, lower, opaque, reduce,
                             tensor, upper)

P1P1 = corpus.p1xp1_curve(2, 3)
TRIPLE = corpus.triple_product(2)
coef = st.fractions(min_value=-4, max_value=4, max_denominator=5)


def test_codim_bookkeeping():
    pt_c, ns = basis_class(CURVE, "pt"), basis_class(SURFACE, "ns:H1")
    assert tensor(pt_c, ns).codim == 2
    assert graph().codim == 2
    with pytest.raises(GradingError):
        tensor(pt_c, ns) + tensor(curve_fundamental(), ns)
    with pytest.raises(GradingError):
        tensor(ns, pt_c)


def test_uncovered_products_raise():
    with pytest.raises(PartialProductError):
        intersect(opaque("x"), graph(), P1P1)
    with pytest.raises(GradingError):
        intersect(graph(), graph(), P1P1)


@pytest.mark.parametrize("ctx", [P1P1, corpus.plane_curve(4), TRIPLE], ids=["p1xp1", "p2", "triple"])
def test_graph_acts_as_push_and_pull(ctx):
    for label in ctx.curve.labels(0) + ctx.curve.labels(1):
        a = basis_class(CURVE, label)
        assert lower(graph(), a, ctx) == ctx.f_push(a)
    for label in ctx.surface.labels(1):
        b = basis_class(SURFACE, label)
        assert upper(graph(), b, ctx) == ctx.f_pull(b)


def test_graph_rewrite_on_a_chow_trivial_surface():
    # the dual basis of (H1, H2) under [[0,1],[1,0]] is (H2, H1)
    ctx = P1P1
    pt = basis_class(SURFACE, "pt")
    h1, h2 = basis_class(SURFACE, "ns:H1"), basis_class(SURFACE, "ns:H2")
    expected = (tensor(curve_fundamental(), pt) + tensor(ctx.f_pull(h1), h2) + tensor(ctx.f_pull(h2), h1))
    assert reduce(graph(), ctx) == expected


def test_graph_stays_symbolic_without_a_decomposition():
    assert reduce(graph(), TRIPLE) == graph()


@settings(max_examples=40, deadline=None)
@given(coef, coef, coef)
def test_rewrite_preserves_correspondence_action(x, y, z):
    ctx = P1P1
    b = surface_divisor({"H1": x, "H2": y})
    a = basis_class(CURVE, "pt", z) + basis_class(CURVE, "pic:p1", x)
    r = reduce(graph(), ctx)
    assert upper(r, b, ctx) == upper(graph(), b, ctx)
    assert lower(r, a, ctx) == lower(graph(), a, ctx)


def test_degree_of_graph_against_xi():
    ctx = P1P1
    assert degree(intersect(graph(), tensor(curve_fundamental(), ctx.xi), ctx), ctx) == 1


@settings(max_examples=40, deadline=None)
@given(st.lists(coef, min_size=3, max_size=3))
def test_linear_structure(cs):
    ns = [basis_class(SURFACE, f"ns:{n}") for n in ("H1", "H2")]
    x = tensor(basis_class(CURVE, "pt"), ns[0]) * cs[0] + tensor(basis_class(CURVE, "pic:p1"), ns[1]) * cs[1]
    assert (x - x).is_zero()
    assert x * cs[2] + x == x * (cs[2] + 1)
    assert CycleExpr.zero(2) + x == x
    assert x / 2 * 2 == x
