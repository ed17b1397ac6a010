import dataclasses
from fractions import Fraction

import pytest

from chowcalc import corpus
from chowcalc.classes import (CURVE, FactorClass, GradingError, basis_class, curve_divisor,
                              surface_divisor, surface_point)
from chowcalc.context import ContextError, NormalizationError

CORPUS = {
    "p2_1": corpus.plane_curve(1), "p2_4": corpus.plane_curve(4),
    "p1xp1_2_3": corpus.p1xp1_curve(2, 3), "triple_2": corpus.triple_product(2),
    "triple_3": corpus.triple_product(3, Fraction(1, 3), Fraction(2, 3), v_e=(1, 0)),
    "k3": corpus.k3_lattice(), "rank2": corpus.rank_two_lattice(),
}


def failing(ctx):
    return {r.name for r in ctx.validate() if not r.ok}


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_corpus_contexts_validate(name):
    ctx = CORPUS[name]
    assert failing(ctx) == set()
    assert ctx.eta.degree == 1


def test_factor_class_arithmetic():
    a = curve_divisor(2, {"p1": 1})
    b = curve_divisor(-1, {"p2": Fraction(1, 2)})
    assert (a + b).degree == 1
    assert (a - a).is_zero()
    assert (a * 3).coeff("pic:p1") == 3
    assert a.ns_part() == {} and a.trivial_part() == {"p1": 1}
    with pytest.raises(GradingError):
        a + surface_divisor({"H": 1})
    with pytest.raises(GradingError):
        FactorClass.of(CURVE, 0, {"pt": 1})


def test_non_symmetric_gram_is_named():
    ctx = CORPUS["p1xp1_2_3"]
    bad = dataclasses.replace(ctx, surface=dataclasses.replace(ctx.surface, ns_gram=((0, 1), (2, 0))))
    assert "ns_gram_symmetric" in failing(bad)
    with pytest.raises(ContextError):
        bad.check()


def test_indefinite_nt_gram_is_named():
    ctx = CORPUS["p2_4"]
    bad = dataclasses.replace(ctx, curve=dataclasses.replace(ctx.curve, nt_gram=((1, 0), (0, -1))))
    assert "nt_gram_psd" in failing(bad)


def test_h1_flag_conflict():
    ctx = CORPUS["p2_4"]
    bad = dataclasses.replace(ctx, surface=dataclasses.replace(ctx.surface, pic0=("w",)))
    assert "h1_zero_flag" in failing(bad)


def test_projection_formula_is_checked():
    ctx = CORPUS["p1xp1_2_3"]
    m = ctx.morphism
    bad = dataclasses.replace(ctx, morphism=dataclasses.replace(
        m, pull_ns={**m.pull_ns, "H1": curve_divisor(5)}))
    assert "projection_formula" in failing(bad)


def test_corrupted_mu_table_is_caught():
    ctx = CORPUS["triple_2"]
    rule = ctx.opaque["mu_f"]
    lower = dict(rule.lower)
    lower["pt"] = surface_divisor({"F1": 1})
    bad = dataclasses.replace(ctx, opaque={"mu_f": dataclasses.replace(rule, lower=lower)})
    assert failing(bad)


def test_eta_normalization():
    ctx = CORPUS["p2_4"]
    scaled = dataclasses.replace(ctx, surface=dataclasses.replace(ctx.surface, xi=surface_divisor({"H": 1})))
    assert scaled.eta.degree == 4
    from chowcalc.decompositions import decompose
    from chowcalc.cycles import graph
    with pytest.raises(NormalizationError):
        decompose(graph(), scaled)


def test_pushforward_of_a_point():
    ctx = CORPUS["p1xp1_2_3"]
    assert ctx.f_push(basis_class(CURVE, "pt")) == surface_point(1)
    assert ctx.ns_pair(ctx.xi, ctx.f_push(basis_class(CURVE, "C"))) == 1
