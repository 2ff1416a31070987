import json
import random
from fractions import Fraction

import pytest

from polypol import (ContradictionError, ModelFormatError,
                     ModelValidationError, TermSyntaxError, parse_constraint,
                     parse_instantiation, parse_model, render_constraint,
                     render_instantiation, serialize_model)
from polypol import maxplus, mdp
from helpers import random_point, random_pmdp, random_sc_matrix

F = Fraction


def test_parse_shipped_pmdp(travel_model):
    m = travel_model
    assert isinstance(m, mdp.Pmdp)
    assert m.states == ("P", "M", "B")
    assert m.absorbing == 2
    assert m.enabled(0) == (0, 1)  # TGV and Corail
    assert m.move(0, 0).dist == ((0, F(1, 5)), (1, F(4, 5)))


def test_parse_shipped_pdwg(graph_model):
    m = graph_model
    assert isinstance(m, maxplus.MaxPlusMatrix)
    assert m.n == 4
    assert m.entries[0][2] is None
    assert str(m.entries[3][2]) == "w43"
    assert len(list(m.edges())) == 9


def test_rejects_unknown_type():
    with pytest.raises(ModelFormatError):
        parse_model(json.dumps({"type": "nope"}))
    with pytest.raises(ModelFormatError):
        parse_model("{not json")


def test_rejects_undeclared_parameter(pdwg_path):
    doc = json.load(open(pdwg_path))
    doc["edges"][0]["weight"] = "q + 1"
    with pytest.raises(ModelValidationError) as err:
        parse_model(json.dumps(doc))
    assert any("undeclared" in v and "q" in v for v in err.value.violations)


def test_rejects_duplicate_edge(pdwg_path):
    doc = json.load(open(pdwg_path))
    doc["edges"].append(dict(doc["edges"][0]))
    with pytest.raises(ModelValidationError) as err:
        parse_model(json.dumps(doc))
    assert any("duplicate edge" in v for v in err.value.violations)


def test_rejects_bad_probability(pmdp_path):
    doc = json.load(open(pmdp_path))
    doc["transitions"][0]["to"][0]["prob"] = "2/5"  # row now sums to 6/5
    with pytest.raises(ModelValidationError) as err:
        parse_model(json.dumps(doc))
    assert any("sum" in v for v in err.value.violations)
    doc["transitions"][0]["to"][0]["prob"] = 0.2
    with pytest.raises(ModelFormatError):
        parse_model(json.dumps(doc))


def test_rejects_duplicate_transition(pmdp_path):
    doc = json.load(open(pmdp_path))
    doc["transitions"].append(dict(doc["transitions"][1]))
    with pytest.raises(ModelValidationError) as err:
        parse_model(json.dumps(doc))
    assert any("duplicate transition" in v for v in err.value.violations)


def test_rejects_unknown_state_with_context(pmdp_path):
    doc = json.load(open(pmdp_path))
    doc["transitions"][2]["to"] = [{"state": "X", "prob": "1"}]
    with pytest.raises(ModelValidationError) as err:
        parse_model(json.dumps(doc))
    assert any("transitions[2]" in v and '"X"' in v for v in err.value.violations)


def test_rejects_duplicate_names(pdwg_path):
    doc = json.load(open(pdwg_path))
    doc["states"] = ["1", "1", "3", "4"]
    with pytest.raises(ModelValidationError):
        parse_model(json.dumps(doc))


def test_model_round_trip(travel_model, graph_model):
    assert parse_model(serialize_model(travel_model)) == travel_model
    assert parse_model(serialize_model(graph_model)) == graph_model


def test_random_model_round_trip():
    rng = random.Random(31)
    for _ in range(10):
        m = random_pmdp(rng)
        assert parse_model(serialize_model(m)) == m
        g = random_sc_matrix(rng)
        assert parse_model(serialize_model(g)) == g


def test_parse_instantiation_forms():
    inline = parse_instantiation("p1=7,p2=11,p3=1")
    assert inline == {"p1": 7, "p2": 11, "p3": 1}
    lines = parse_instantiation("# reference\np1 = 7\np2=11, p3=4/5\n")
    assert lines == {"p1": 7, "p2": 11, "p3": F(4, 5)}
    assert parse_instantiation("") == {}


@pytest.mark.parametrize("bad", ["p1", "p1=", "=3", "p1=1.5", "p1=7 p2=1",
                                 "p1=7,p1=8"])
def test_parse_instantiation_rejects(bad):
    with pytest.raises(TermSyntaxError):
        parse_instantiation(bad)


def test_instantiation_round_trip():
    rng = random.Random(32)
    pi = random_point(rng, [f"q{i}" for i in range(6)])
    assert parse_instantiation(render_instantiation(pi)) == pi


def test_parse_constraint_relations():
    k = parse_constraint("p2 >= 5/4*p1 + p3\n")
    assert [str(iq) for iq in k.inequalities] == ["5*p1 - 4*p2 + 4*p3 <= 0"]
    assert parse_constraint("p1 < 2\np1 < 2\n# note\n\n").inequalities[0].strict


def test_parse_constraint_empty_is_true():
    assert parse_constraint("").is_true
    assert parse_constraint("# true\n").is_true
    assert parse_constraint("p1 <= p1\n").is_true


def test_parse_constraint_contradiction():
    with pytest.raises(ContradictionError):
        parse_constraint("1 <= 0\n")


@pytest.mark.parametrize("bad", ["p1 <= 1 <= 2", "p1 = 2", "p1 !< 2", "<= 1"])
def test_parse_constraint_rejects(bad):
    with pytest.raises(TermSyntaxError):
        parse_constraint(bad)


def test_constraint_round_trip(travel_model, travel_pi0):
    k = mdp.p_mdp_pi(travel_model, travel_pi0).constraint
    assert parse_constraint(render_constraint(k)) == k
    assert render_constraint(parse_constraint("# true\n")) == "# true\n"
