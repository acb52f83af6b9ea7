from __future__ import annotations

import random

import pytest

from helpers import corpus_model, ttsb_family
from ntacomp.compose import IncompatibleTTSBs, mutation, parallel, restrict_ttsb
from ntacomp.corpus.generate import example2, random_ttsb, shared_pool
from ntacomp.semantics import network_ttsbs
from ntacomp.ttsb import TAU, check_ttsb_axioms, recv, send, transition_set
from ntacomp.valuations import Valuation, loc_var, restrict


def corpus_ttsbs():
    for name in ("producer_consumer", "wsn"):
        net = corpus_model(name)
        for T in network_ttsbs(net):
            yield f"{name}:{T.automaton.name}", T


@pytest.mark.parametrize("label,T", list(corpus_ttsbs()), ids=lambda x: x if isinstance(x, str) else "")
def test_corpus_ttsb_axioms(label, T):
    assert check_ttsb_axioms(T) == []


@pytest.mark.parametrize("label,T", list(corpus_ttsbs()), ids=lambda x: x if isinstance(x, str) else "")
def test_committed_location_iff_committed_state(label, T):
    A = T.automaton
    states, _ = T.closure()
    for s in states:
        assert (s[A.loc_name] in A.committed) == T.is_committed(s)


def test_random_ttsbs_satisfy_axioms():
    rng = random.Random(5)
    for _ in range(100):
        (T,) = ttsb_family(rng, ["T"], n_ext=2)
        assert check_ttsb_axioms(T) == []


def test_pairwise_compositions_are_ttsbs_and_committedness_splits():
    rng = random.Random(11)
    for _ in range(100):
        T1, T2 = ttsb_family(rng, ["P", "Q"])
        T = parallel(T1, T2)
        assert check_ttsb_axioms(T) == []
        v1 = {v.name for v in T1.variables}
        v2 = {v.name for v in T2.variables}
        for s in T.reachable():
            r, q = restrict(s, v1), restrict(s, v2)
            assert T.is_committed(s) == (T1.is_committed(r) or T2.is_committed(q))


def test_composition_commutes_and_associates():
    rng = random.Random(23)
    for _ in range(100):
        T1, T2, T3 = ttsb_family(rng, ["P", "Q", "R"])
        assert transition_set(parallel(T1, T2)) == transition_set(parallel(T2, T1))
        assert transition_set(parallel(parallel(T1, T2), T3)) == transition_set(parallel(T1, parallel(T2, T3)))


def committed_sends(T):
    return {tr for tr in transition_set(T) if tr[1] == send("d", True) and tr[2]}


def test_example2_associates_with_committed_broadcast():
    T1, T2, T3 = example2()
    left = parallel(parallel(T1, T2), T3)
    right = parallel(T1, parallel(T2, T3))
    assert transition_set(left) == transition_set(right)
    assert committed_sends(left) and committed_sends(left) == committed_sends(right)


def test_example2_breaks_with_comm_condition_on_broadcast():
    # negative control: adding the priority condition to SND loses
    # associativity on this triple
    with mutation("snd-comm-condition"):
        T1, T2, T3 = example2()
        left = parallel(parallel(T1, T2), T3)
        right = parallel(T1, parallel(T2, T3))
        assert transition_set(left) != transition_set(right)


def test_incompatible_ttsbs_rejected():
    rng = random.Random(0)
    a = random_ttsb(rng, "S", shared_pool(1), ["a"], ["d"])
    b = random_ttsb(rng, "S", shared_pool(1), ["a"], ["d"])
    with pytest.raises(IncompatibleTTSBs):
        parallel(a, b)


# -- hand-built compositions -----------------------------------------------------------------


def two_state(name, moves):
    from ntacomp.ttsb import ExplicitTTSB

    locs = sorted({m[0] for m in moves} | {m[3] for m in moves})
    v = loc_var(f"{name}.l", tuple(locs), owner=name)
    st = {loc: Valuation({v: loc}) for loc in locs}
    table = {st[loc]: [] for loc in locs}
    for src, a, b, dst in moves:
        table[st[src]].append((a, b, st[dst]))
    return ExplicitTTSB((), (v,), st[locs[0]], table, broadcast=("d",))


def test_broadcast_with_no_listener_and_binary_handshake():
    S = two_state("S", [("a", send("d", True), False, "b"), ("a", send("c"), False, "b"),
                           ("a", recv("d", True), False, "a"), ("b", recv("d", True), False, "b")])
    R = two_state("R", [("a", recv("c"), False, "b"), ("a", recv("d", True), False, "a"),
                           ("b", recv("d", True), False, "b")])
    P = parallel(S, R)
    moves = {(str(a), tuple(sorted(tgt.items()))) for a, _, tgt in P.successors(P.initial)}
    # broadcast: the receiver's self-loop listens; binary: a tau
    assert ("d!", (("R.l", "a"), ("S.l", "b"))) in moves
    assert ("tau", (("R.l", "b"), ("S.l", "b"))) in moves
    hidden = restrict_ttsb(P, {"c", "d"})
    acts = {str(a) for a, _, _ in hidden.successors(hidden.initial)}
    assert acts == {"tau"}


def test_restriction_drops_uncommitted_broadcast_from_committed_state():
    S = two_state("S", [("a", send("d", True), False, "b"), ("a", TAU, True, "b"),
                           ("a", recv("d", True), False, "a"), ("b", recv("d", True), False, "b")])
    hidden = restrict_ttsb(S, {"d"})
    assert [(str(a), b) for a, b, _ in hidden.successors(hidden.initial)] == [("tau", True)]


def test_axiom_violations_detected():
    from ntacomp.ttsb import ExplicitTTSB

    e = shared_pool(1)[0]
    v = loc_var("S.l", ("q",), owner="S")
    s0, s1 = (Valuation({e: x, v: "q"}) for x in (False, True))
    # input enabled only while e is false; the broadcast input writes e
    table = {s0: [(recv("c"), False, s0), (recv("d", True), False, s1)], s1: [(recv("d", True), False, s1)]}
    T = ExplicitTTSB((e,), (v,), s0, table, broadcast=("d",), alphabet=("c",))
    axioms = {x.axiom for x in check_ttsb_axioms(T)}
    assert axioms == {"III", "VI"}
