"""Monomial charts and the component blow-up schedule."""

import itertools

import pytest

from chowcalc.semistable import (PI, ChartError, LocalChart, SpecialFiberCurve, SpecialFiberSurface,
                                 blowup_chart, case_table, certify_non_deep_points, classify_intersection,
                                 component_fan, component_valuation, deep_points, fuzz, is_strictly_semistable,
                                 iterated_blowup_fan, local_models_at, make_chart, model_as_dict, mono,
                                 non_cartier_cases, normal_form, parse_monomial, product_components,
                                 random_configuration, render_model, run_schedule, same_presentation,
                                 validate_schedule, z_list)

NODE = SpecialFiberCurve(("A1", "A2"), (("A1", "A2"),))
DOUBLE = SpecialFiberSurface(("B1", "B2"), (("B1", "B2"),))
TRIPLE = SpecialFiberSurface(("B1", "B2", "B3"), (("B1", "B2"), ("B1", "B3"), ("B2", "B3")),
                             (("B1", "B2", "B3"),))


# ---- charts ---------------------------------------------------------------------------

def test_strictly_semistable_recognition():
    assert is_strictly_semistable(make_chart(("x1", "y1", "y2", "y3"), [(mono("y1", "y2"), PI)]))
    assert not is_strictly_semistable(local_models_at(("node", "double")))
    assert not is_strictly_semistable(make_chart(("x1", "y1", "y2", "y3"), [(mono(y1=2), PI)]))


def test_normal_form_eliminates_solved_variables():
    ch = make_chart(("x1", "x2", "y1", "y2", "y3"), [(mono("y1", "y2"), PI), (mono("x1"), mono("y1"))])
    nf = normal_form(ch)
    assert len(nf.vars) == 4 and len(nf.relations) == 1
    assert is_strictly_semistable(ch)


def test_chart_validation():
    with pytest.raises(ChartError):
        LocalChart(("x1",), ((mono("x2"), PI),))
    with pytest.raises(ChartError):
        make_chart(("z",), [])
    with pytest.raises(ChartError):
        blowup_chart(local_models_at(("node", "double")), ("x1", "q"))
    with pytest.raises(ChartError):
        local_models_at(("cusp", "double"))
    with pytest.raises(ChartError):
        parse_monomial("x1*y")


def test_cartier_center_is_identity():
    ch = local_models_at(("smooth", "double"))
    assert blowup_chart(ch, {"y1": 1}) == [ch]
    assert blowup_chart(ch, ("y1",)) == [ch]
    assert len(blowup_chart(ch, component_valuation(1, 1))) == 2


def test_non_cartier_cases_and_certification():
    assert len(non_cartier_cases()) == 3
    for ch in non_cartier_cases():
        assert not is_strictly_semistable(ch)
        assert len(ch.ideal_of(component_valuation(1, 1))) == 2
    assert certify_non_deep_points() == {"nodexsmooth": True, "smoothxdouble": True,
                                         "smoothxtriple": True, "smoothxsmooth": True}


def test_half_space_blowup_of_node_double():
    charts = blowup_chart(local_models_at(("node", "double")), component_valuation(1, 1))
    assert len(charts) == 2
    assert all(is_strictly_semistable(c) for c in charts)


# ---- the case table ----------------------------------------------------------------------

def test_case_table_reproduces_displayed_outcomes():
    rows = {r.kind: r for r in case_table()}
    assert rows["double"].matches == (True, True)
    assert rows["double"].survivors == ()
    tri = rows["triple"]
    assert tri.matches == (True, True)
    assert len(tri.survivors) == 1
    assert same_presentation(tri.survivors[0], non_cartier_cases()[2].vars, non_cartier_cases()[2].relations)
    assert set(tri.resolving_centers) == {(1, 2), (1, 3), (2, 2), (2, 3)}


def test_displayed_outcome_with_wrong_relation_does_not_match():
    out = blowup_chart(local_models_at(("node", "double")), component_valuation(1, 1))
    wrong = [(parse_monomial("x1'^2x2y1"), PI)]
    assert not any(same_presentation(o, ("x1'", "x2", "y1", "y3"), wrong) for o in out)


# ---- fans --------------------------------------------------------------------------------

def test_iterated_fan_counts():
    assert len(iterated_blowup_fan(1, 1, [])) == 1
    assert len(iterated_blowup_fan(1, 1, [(2, 2)])) == 2
    assert len(iterated_blowup_fan(1, 1, [(2, 2), (2, 3)])) == 3
    with pytest.raises(ChartError):
        iterated_blowup_fan(1, 1, [(2, 2), (2, 2)])


def _exhaustive(kind):
    surf = DOUBLE if kind == "double" else TRIPLE
    comps, _ = product_components(NODE, surf)
    bad = literal_bad = 0
    for schedule in itertools.permutations(comps):
        model = run_schedule(NODE, surf, schedule)
        assert model.semistable and not model.inconsistent
        bad += not model.traces_ok
        point = [p for p in deep_points(NODE, surf) if p.kind == kind][0]
        run = [r for r in model.runs if r.point.name == point.name][0]
        index = point.local_index()
        for c in comps:
            literal = [index[k] for k in z_list(c, schedule, NODE, surf)]
            try:
                ok = component_fan(run.charts, *index[c], kind) == iterated_blowup_fan(*index[c], literal)
            except ChartError:
                ok = False
            literal_bad += not ok
    return bad, literal_bad


def test_exhaustive_double_point_schedules():
    bad, literal_bad = _exhaustive("double")
    assert bad == 0
    assert literal_bad > 0


def test_exhaustive_triple_point_schedules():
    bad, literal_bad = _exhaustive("triple")
    assert bad == 0
    assert literal_bad > 0


# ---- whole fibers ------------------------------------------------------------------------

def test_smooth_curve_changes_nothing():
    curve = SpecialFiberCurve(("A1",))
    model = run_schedule(curve, TRIPLE)
    assert model.runs == ()
    assert model.semistable and model.traces_ok
    assert all(not model.center_list(c) for c in model.components)


def test_literal_list_fails_on_small_resolution():
    schedule = (("A1", "B1"), ("A1", "B2"), ("A2", "B1"), ("A2", "B2"))
    model = run_schedule(NODE, DOUBLE, schedule)
    assert model.semistable and model.traces_ok
    assert z_list(("A1", "B2"), schedule, NODE, DOUBLE) == [("A2", "B1")]
    assert model.skipped(("A1", "B2")) == [("A2", "B1")]
    assert ("A1", "B2") in model.flagged
    run = model.runs[0]
    index = run.point.local_index()
    realized = component_fan(run.charts, *index[("A1", "B2")], "double")
    assert realized != iterated_blowup_fan(*index[("A1", "B2")], [index[("A2", "B1")]])
    assert realized == iterated_blowup_fan(*index[("A1", "B2")], [])


def test_node_triple_trace_is_full_z_list():
    surf = SpecialFiberSurface(("B1", "B2", "B3"), (("B1", "B2"), ("B1", "B3"), ("B2", "B3")),
                               (("B1", "B2", "B3"),))
    model = run_schedule(NODE, surf)
    assert model.semistable and model.traces_ok
    comp = ("A1", "B1")
    assert model.z_lists[comp] == [("A2", "B2"), ("A2", "B3")]
    assert model.center_list(comp) == model.z_lists[comp]


def test_classification():
    assert classify_intersection(("A1", "B1"), ("A2", "B2"), NODE, DOUBLE) == "smooth curve"
    assert classify_intersection(("A1", "B1"), ("A1", "B2"), NODE, DOUBLE) == "Cartier divisor"
    curve = SpecialFiberCurve(("A1", "A2"))
    assert classify_intersection(("A1", "B1"), ("A2", "B2"), curve, DOUBLE) == "empty"
    with pytest.raises(ChartError):
        classify_intersection(("A1", "B1"), ("A1", "B1"), NODE, DOUBLE)


def test_schedule_validation():
    comps, _ = product_components(NODE, DOUBLE)
    assert validate_schedule(comps, comps) == tuple(comps)
    with pytest.raises(ChartError, match="repeats"):
        validate_schedule(comps + [comps[0]], comps)
    with pytest.raises(ChartError, match="missing"):
        validate_schedule(comps[:-1], comps)
    with pytest.raises(ChartError, match="unknown"):
        validate_schedule(comps[:-1] + [("A9", "B1")], comps)


def test_fiber_validation():
    with pytest.raises(ChartError):
        SpecialFiberCurve(("A1", "A1"))
    with pytest.raises(ChartError):
        SpecialFiberCurve(("A1",), (("A1", "A1"),))
    with pytest.raises(ChartError):
        SpecialFiberSurface(("B1", "B2", "B3"), (("B1", "B2"),), (("B1", "B2", "B3"),))


def test_verdict_is_independent_of_order():
    comps, _ = product_components(NODE, TRIPLE)
    for schedule in [comps, comps[::-1], comps[2:] + comps[:2]]:
        model = run_schedule(NODE, TRIPLE, schedule)
        assert model.semistable and model.traces_ok


def test_fuzz_and_rendering():
    results = fuzz(range(25))
    assert all(r.semistable and r.traces_ok for r in results)
    curve, surf, schedule = random_configuration(3)
    assert random_configuration(3) == (curve, surf, schedule)
    model = run_schedule(curve, surf, schedule)
    assert render_model(model) == render_model(run_schedule(curve, surf, schedule))
    data = model_as_dict(model)
    assert isinstance(data, dict) and data
