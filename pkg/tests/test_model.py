from __future__ import annotations

import pytest

from helpers import corpus_model
from ntacomp.corpus.generate import NetworkConfig, random_network
from ntacomp.model.errors import DuplicateDeclaration, ModelSyntaxError, ModelTypeError, UnboundName
from ntacomp.model.parser import parse_model
from ntacomp.model.printer import print_network
from ntacomp.model.validate import validate_axioms

CORPUS = ["producer_consumer", "wsn", "fig1_axiom_xi_violation"]


def wrap(body: str, decls: str = "") -> str:
    return f"{decls}\nautomaton A {{\n{body}\n}}\nsystem A;\n"


def test_producer_consumer_shape():
    net = corpus_model("producer_consumer", N=3)
    assert net.names == ("Producer", "Coordinator", "Consumer[1]", "Consumer[2]", "Consumer[3]")
    prod = net.automaton("Producer")
    assert prod.locations == ("run", "overflow")
    assert dict(net.constants)["BUF"] == 10


def test_wsn_select_expansion():
    net = corpus_model("wsn")
    receivers = [e for e in net.automaton("Synchronizer[0]").edges if e.label.kind == "recv"]
    # one receiving transition per other node, in declaration order
    chans = [e.label.channel for e in receivers]
    assert "start_message[1]" in chans and "start_message[2]" in chans
    assert "start_message[0]" not in chans


def test_empty_body_is_syntax_error():
    with pytest.raises(ModelSyntaxError):
        parse_model("automaton A { }\nsystem A;")


def test_clock_disjunction_rejected():
    src = wrap("local clock x; init l; trans l -> l { guard x > 8 || x <= 1; }")
    with pytest.raises(ModelTypeError):
        parse_model(src)


def test_mixed_clock_data_atom_rejected():
    src = wrap("local clock x; local int[0, 3] n = 0; init l; trans l -> l { guard x == n; }")
    with pytest.raises(ModelTypeError):
        parse_model(src)


def test_unbound_and_duplicate_names():
    with pytest.raises(UnboundName):
        parse_model(wrap("init l; trans l -> l { do m := 1; }"))
    with pytest.raises(DuplicateDeclaration):
        parse_model(wrap("init l;", "var int[0, 1] a = 0; var bool a;"))
    with pytest.raises(UnboundName):
        parse_model(wrap("init l;"), params={"NOPE": 1})


def test_diagnostics_have_positions():
    with pytest.raises(ModelSyntaxError) as info:
        parse_model("const int N = 2;\nautomaton A {\n  init l;\n  trans l -> { }\n}\n")
    assert info.value.line == 4 and info.value.column > 0


def test_unbounded_int_rejected():
    with pytest.raises(ModelSyntaxError):
        parse_model(wrap("init l;", "var int n = 0;"))


# -- validation ---------------------------------------------------------------------------


@pytest.mark.parametrize("name", ["producer_consumer", "wsn"])
def test_corpus_models_valid(name):
    assert validate_axioms(corpus_model(name)) == []


def test_fig1_violates_axiom_xi_on_both_receivers():
    bad = validate_axioms(corpus_model("fig1_axiom_xi_violation"))
    assert {v.axiom for v in bad} == {"AxiomXI"}
    assert sorted(v.automaton for v in bad) == ["Double", "Inc"]


def test_lower_bound_invariant_not_left_closed():
    net = parse_model(wrap("local clock x; init l; inv l { x >= 5 }"))
    assert [v.axiom for v in validate_axioms(net)] == ["InitialInvariant", "LeftClosed"]


def test_external_invariant_and_input_guard():
    decls = "var int[0, 2] g = 0; binary chan c;"
    net = parse_model(wrap("local clock x; init l; inv l { x <= 2 && g <= 1 } trans l -> l { guard g == 0; sync c?; }", decls))
    assert [v.axiom for v in validate_axioms(net)] == ["AxiomVII", "AxiomVIII"]


def test_urgent_must_be_tau_without_clock_guard():
    decls = "binary chan c;"
    net = parse_model(wrap("local clock x; init l; trans l -> l { guard x >= 1; urgent; } trans l -> l { sync c!; urgent; }", decls))
    assert [v.axiom for v in validate_axioms(net)] == ["AxiomX", "AxiomX"]


def test_committed_location_needs_a_way_out():
    net = parse_model(wrap("local int[0, 2] k = 0; init l; location l, c; committed c; trans l -> c { } trans c -> l { guard k == 1; }"))
    assert [v.axiom for v in validate_axioms(net)] == ["AxiomIX"]
    ok = parse_model(wrap("local int[0, 2] k = 0; init l; location l, c; committed c; trans l -> c { } trans c -> l { }"))
    assert validate_axioms(ok) == []


def test_validation_order_independent():
    net = corpus_model("producer_consumer")
    rev = net.replace_automata(tuple(reversed(net.automata)))
    assert validate_axioms(net) == validate_axioms(rev)


# -- printing ------------------------------------------------------------------------------


@pytest.mark.parametrize("name", CORPUS)
def test_print_round_trip_corpus(name):
    net = corpus_model(name)
    assert parse_model(print_network(net)) == net


@pytest.mark.parametrize("seed", range(40))
def test_print_round_trip_random(seed):
    net = random_network(NetworkConfig(seed=seed))
    assert parse_model(print_network(net)) == net
