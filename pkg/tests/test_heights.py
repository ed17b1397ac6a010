"""The unramified function-field height of the arithmetic diagonal."""

import random
from fractions import Fraction

import pytest
import sympy as sp

from chowcalc.heights import (OMEGA, ArithSurfaceData, HeightError, closed_form, e_bar, faulty_push_pair,
                              height_unramified, k3_bound, k3_height, kappa, push_delta_sq, satisfies_k3_bound)

from support import rational


def oracle(genus, w2, wp, p2, fp):
    """Closed form evaluated with sympy matrices, independently of the package's lattice code."""
    G = sp.Matrix([[w2, 2 * genus - 2, wp], [2 * genus - 2, 0, fp], [wp, fp, p2]])
    omega, P = sp.Matrix([1, 0, 0]), sp.Matrix([0, 0, 1])
    d = 2 * genus - 2 - fp
    phi = omega - P
    return sp.nsimplify(-((d + 1) * omega - P).T * G * phi / d)[0]


def random_data(rng):
    while True:
        data = ArithSurfaceData(rng.randint(0, 6), rational(rng, 20, 6), rational(rng, 20, 6),
                                rational(rng, 20, 6), rational(rng, 6, 3))
        if data.d != 0:
            return data


def test_routes_agree_with_oracle():
    rng = random.Random(2024)
    for _ in range(200):
        data = random_data(rng)
        res = height_unramified(data)
        assert res.agree
        want = oracle(data.genus, *(sp.Rational(x.numerator, x.denominator)
                                    for x in (data.omega_sq, data.omega_P, data.P_sq, data.F_P)))
        assert sp.Rational(res.value.numerator, res.value.denominator) == want


def test_e_bar_is_isotropic_of_fiber_degree_one():
    rng = random.Random(5)
    for _ in range(50):
        data = random_data(rng)
        e = e_bar(data)
        assert data.pair(e, e) == 0
        assert data.pair(e, (0, 1, 0)) == 1
        assert push_delta_sq(data) == tuple(-a - 2 * b for a, b in zip(OMEGA, e))


def test_symbolic_inputs():
    w2, wp, p2 = sp.symbols("w2 wp p2")
    data = ArithSurfaceData(3, w2, wp, p2, 1)
    res = height_unramified(data)
    assert res.agree
    assert sp.simplify(res.value - oracle(3, w2, wp, p2, 1)) == 0


@pytest.mark.parametrize("g", range(2, 11))
def test_k3_family_symbolic(g):
    h, w2 = sp.symbols("h w2")
    res = height_unramified(ArithSurfaceData.k3(g, w2, h))
    assert res.agree
    value = sp.expand(res.value)
    assert value.coeff(w2) == sp.Rational(-(2 * g - 1), 2 * g - 2)
    assert value.coeff(h) == 2 * g
    assert sp.expand(value - k3_height(g, w2, h)) == 0
    assert sp.expand(k3_bound(g, h) - sp.Rational(4 * g * (g - 1), 2 * g - 1) * h) == 0
    root = sp.solve(value, w2)[0]
    assert sp.simplify(root - k3_bound(g, h)) == 0


def test_k3_bound_numeric():
    assert height_unramified(ArithSurfaceData.k3(2, 1, 1)).value == Fraction(5, 2)
    assert height_unramified(ArithSurfaceData.k3(2, 3, 1)).value == Fraction(-1, 2)
    assert k3_bound(2, 1) == Fraction(8, 3)
    assert satisfies_k3_bound(2, 1, 1)
    assert not satisfies_k3_bound(2, 3, 1)
    assert satisfies_k3_bound(5, k3_bound(5, 2), 2)
    with pytest.raises(HeightError):
        k3_bound(1, 1)
    with pytest.raises(HeightError):
        k3_height(1, 1, 1)


def test_refusals():
    with pytest.raises(HeightError, match="d = 0"):
        height_unramified(ArithSurfaceData(2, 3, 1, 0, 2))
    with pytest.raises(HeightError, match="semistable"):
        height_unramified(ArithSurfaceData(2, 3, 1, 0, 0, smooth=False))
    with pytest.raises(HeightError):
        ArithSurfaceData(-1, 0, 0, 0)
    with pytest.raises(HeightError):
        kappa(ArithSurfaceData(1, 0, 0, 0))


def test_non_isotropic_e_is_refused():
    data = ArithSurfaceData(2, 3, 1, 0)
    with pytest.raises(HeightError, match="e_bar"):
        push_delta_sq(data, e=(Fraction(1, 2), 0, 0))


def test_faulty_rule_breaks_agreement():
    rng = random.Random(9)
    for _ in range(20):
        data = random_data(rng)
        res = height_unramified(data, rule=faulty_push_pair)
        assert res.closed_form == closed_form(data)
        assert res.expansion_route - res.closed_form == 2 * data.pair(OMEGA, (1, 0, -1))
        assert res.agree == (data.pair(OMEGA, (1, 0, -1)) == 0)
