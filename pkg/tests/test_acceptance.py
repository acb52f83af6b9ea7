"""The ten acceptance criteria, one test each, with pinned time limits.

Every test prints a single ``criterion N: PASS|FAIL`` line.  A criterion
fails if any of its checks fails or if it exceeds its time limit."""

from __future__ import annotations

import json
import random
import time
import typing as t

import pytest

from helpers import (
    ALL_MAPS,
    WSN_REDUCED,
    corpus_model,
    exhaustive_failures,
    p1,
    p2,
    p3,
    p4,
    p5,
    p6,
    p7,
    random_map,
    simulated_pair,
    ttsb_family,
)
from ntacomp.cli import main
from ntacomp.compose import parallel, restrict_ttsb
from ntacomp.corpus import model_path, plan_path
from ntacomp.corpus.generate import NetworkConfig, delete_transitions, example2, random_network, random_ttsb, shared_pool
from ntacomp.model.parser import parse_model
from ntacomp.model.validate import validate_axioms
from ntacomp.nta import Equal, check_semantics_equivalence
from ntacomp.semantics import network_ttsbs
from ntacomp.simulation import brute_force_simulation, check_side_condition, check_simulation, is_simulation
from ntacomp.ttsb import check_ttsb_axioms, send, transition_set
from ntacomp.valuations import restrict
from ntacomp.verify import SimulationRefuted, check_safety, load_plan, replays, verify_plan

# seconds
LIMITS = {1: 5, 2: 30, 3: 60, 4: 60, "5": 120, "5-slow": 1800, 6: 60, 7: 300, 8: 600, 9: 1800, 10: 60}


def run_criterion(capsys, key: t.Union[int, str], body: t.Callable[[], str]) -> None:
    limit = LIMITS[key]
    t0 = time.perf_counter()
    error: t.Optional[BaseException] = None
    detail = ""
    try:
        detail = body()
    except Exception as exc:  # reported, then re-raised below
        error = exc
    elapsed = time.perf_counter() - t0
    ok = error is None and elapsed <= limit
    why = detail if error is None else f"{type(error).__name__}: {error}"
    if error is None and elapsed > limit:
        why += f"; over the {limit}s limit"
    with capsys.disabled():
        print(f"\ncriterion {key}: {'PASS' if ok else 'FAIL'} ({elapsed:.1f}s, limit {limit}s) {why}")
    if error is not None:
        raise error
    assert elapsed <= limit, f"criterion {key} took {elapsed:.1f}s (limit {limit}s)"


def corpus_ttsbs():
    pc = corpus_model("producer_consumer")
    wsn = corpus_model("wsn")
    nets = [
        pc,
        wsn,
        parse_model(model_path("pc_abstraction").read_text(), context=pc),
        parse_model(model_path("wsn_abstraction").read_text(), context=wsn),
    ]
    for net in nets:
        yield from network_ttsbs(net)


# -- 1 -------------------------------------------------------------------------------------


def test_criterion_1_valuation_algebra(capsys):
    def body():
        rng = random.Random(1)
        for prop, arity in ((p1, 2), (p2, 3), (p3, 2), (p4, 3), (p5, 3), (p7, 3)):
            for _ in range(1000):
                assert prop(*(random_map(rng) for _ in range(arity))), prop.__name__
        for _ in range(1000):
            X = {n for n in "xyz" if rng.random() < 0.5}
            assert p6(random_map(rng), random_map(rng), X)
        bad = exhaustive_failures(ALL_MAPS, "xyz")
        assert bad == dict.fromkeys("1234567", 0), bad
        return f"7 x 1000 random cases, exhaustive over {len(ALL_MAPS)} maps"

    run_criterion(capsys, 1, body)


# -- 2 -------------------------------------------------------------------------------------


def test_criterion_2_composition_laws(capsys):
    def body():
        rng = random.Random(23)
        for _ in range(100):
            T1, T2, T3 = ttsb_family(rng, ["P", "Q", "R"])
            assert transition_set(parallel(T1, T2)) == transition_set(parallel(T2, T1))
            assert transition_set(parallel(parallel(T1, T2), T3)) == transition_set(parallel(T1, parallel(T2, T3)))
        T1, T2, T3 = example2()
        left, right = parallel(parallel(T1, T2), T3), parallel(T1, parallel(T2, T3))
        L, R = transition_set(left), transition_set(right)
        assert L == R
        committed = [tr for tr in L if tr[1] == send("d", True) and tr[2]]
        assert committed
        return f"100 triples; example triple has {len(L)} transitions, {len(committed)} committed d!"

    run_criterion(capsys, 2, body)


# -- 3 -------------------------------------------------------------------------------------


def test_criterion_3_well_definedness(capsys):
    def body():
        n = 0
        for T in corpus_ttsbs():
            assert check_ttsb_axioms(T) == [], T
            n += 1
        rng = random.Random(11)
        for _ in range(100):
            T1, T2 = ttsb_family(rng, ["P", "Q"])
            assert check_ttsb_axioms(T1) == [] and check_ttsb_axioms(T2) == []
            assert check_ttsb_axioms(parallel(T1, T2)) == []
        return f"{n} corpus automata, 100 random compositions"

    run_criterion(capsys, 3, body)


# -- 4 -------------------------------------------------------------------------------------


def test_criterion_4_committedness(capsys):
    def body():
        rng = random.Random(11)
        checked = 0
        for _ in range(100):
            T1, T2 = ttsb_family(rng, ["P", "Q"])
            T = parallel(T1, T2)
            d1, d2 = T1.domain, T2.domain
            for s in T.reachable():
                assert T.is_committed(s) == (T1.is_committed(restrict(s, d1)) or T2.is_committed(restrict(s, d2)))
                checked += 1
        closure = 0
        for T in corpus_ttsbs():
            A = T.automaton
            states, _ = T.closure()
            for s in states:
                assert (s[A.loc_name] in A.committed) == T.is_committed(s)
            closure += len(states)
        return f"{checked} composed states, {closure} automaton states"

    run_criterion(capsys, 4, body)


# -- 5 -------------------------------------------------------------------------------------


def test_criterion_5_semantics_equivalence(capsys):
    def body():
        pc = check_semantics_equivalence(corpus_model("producer_consumer", N=2))
        assert isinstance(pc, Equal), str(pc)
        wsn = check_semantics_equivalence(corpus_model("wsn", **WSN_REDUCED), budget=10_000_000, engine="fast")
        assert isinstance(wsn, Equal), str(wsn)
        for seed in range(1, 51):
            res = check_semantics_equivalence(random_network(NetworkConfig(seed=seed)))
            assert isinstance(res, Equal), (seed, str(res))
        return f"PC N=2 ({pc.states} states), reduced WSN ({wsn.states} states), 50 random networks"

    run_criterion(capsys, "5", body)


@pytest.mark.slow
def test_criterion_5_semantics_equivalence_full_constants(capsys):
    def body():
        res = check_semantics_equivalence(corpus_model("wsn"), budget=50_000_000, engine="fast")
        assert isinstance(res, Equal), str(res)
        return f"WSN N=3 ({res.states} states, {res.transitions} transitions)"

    run_criterion(capsys, "5-slow", body)


# -- 6 -------------------------------------------------------------------------------------


def test_criterion_6_simulation_oracle(capsys):
    def body():
        rng = random.Random(2024)
        counts = {True: 0, False: 0}
        for trial in range(300):
            ext = shared_pool(1) if trial % 2 else []
            locs = (lambda: rng.randint(1, 2)) if ext else (lambda: rng.randint(1, 4))
            T2 = random_ttsb(rng, "Q", ext, binary=["a"], broadcast=["d"], locations=locs())
            if rng.random() < 0.3:
                T1 = delete_transitions(rng, T2)
            else:
                T1 = random_ttsb(rng, "P", ext, binary=["a"], broadcast=["d"], locations=locs())
            res = check_simulation(T1, T2)
            oracle = brute_force_simulation(T1, T2)
            assert bool(res) == oracle, trial
            if res:
                assert is_simulation(T1, T2, res.relation)
            counts[oracle] += 1
        assert min(counts.values()) > 0
        return f"300 systems ({counts[True]} simulated, {counts[False]} refuted)"

    run_criterion(capsys, 6, body)


# -- 7 -------------------------------------------------------------------------------------


def test_criterion_7_precongruence(capsys):
    def body():
        rng = random.Random(7)
        pool = shared_pool(2)
        for _ in range(200):
            ext = [v for v in pool if rng.random() < 0.6]
            T1, T2 = simulated_pair(rng, ext)
            T3 = random_ttsb(rng, "Q", [v for v in pool if rng.random() < 0.6], binary=["a"], broadcast=["d"],
                             locations=rng.randint(1, 3), ceiling=rng.choice([0, 2]))
            assert check_simulation(parallel(T1, T3), parallel(T2, T3))
        trials = skipped = 0
        while trials < 200:
            ext = [v for v in pool if rng.random() < 0.6]
            T1, T2 = simulated_pair(rng, ext)
            C = {n for n in ["a", "d"] + [v.name for v in ext] if rng.random() < 0.5}
            if not check_side_condition(T1, C):
                skipped += 1
                continue
            trials += 1
            assert check_simulation(restrict_ttsb(T1, C, strict=False), restrict_ttsb(T2, C, strict=False))
        return f"200 composition trials, 200 restriction trials ({skipped} draws lacked the side condition)"

    run_criterion(capsys, 7, body)


# -- 8 -------------------------------------------------------------------------------------


def test_criterion_8_producer_consumer(capsys):
    def body():
        out = []
        for N in (2, 3, 4):
            mono = check_safety(corpus_model("producer_consumer", N=N), "safe")
            cv = verify_plan(model_path("producer_consumer"), load_plan(plan_path("pc")), {"N": N})
            assert mono.status == "Safe"
            assert cv.verdict.status == "Safe" and cv.report.green
            out.append(f"N={N}: {mono.states}/{cv.verdict.states} states")
        return "; ".join(out)

    run_criterion(capsys, 8, body)


# -- 9 -------------------------------------------------------------------------------------


@pytest.mark.slow
def test_criterion_9_wsn(capsys):
    def body():
        code = main(["cv", "models/wsn.tanet", "--plan", "plans/wsn_pairs.cvplan", "--all-pairs", "--json"])
        report = json.loads(capsys.readouterr().out)
        assert code == 0 and report["verdict"] == "Safe"
        assert len(report["runs"]) == 3
        for run in report["runs"]:
            assert run["verdict"] == "Safe"
            assert all(o["status"] == "pass" for o in run["obligations"])
        mono = check_safety(corpus_model("wsn"), "synced", budget=50_000_000, engine="fast")
        assert mono.status == "Safe"
        return f"3 pairs Safe, monolithic Safe ({mono.states} states)"

    run_criterion(capsys, 9, body)


# -- 10 ------------------------------------------------------------------------------------


def test_criterion_10_negative_controls(capsys):
    def body():
        bad = validate_axioms(corpus_model("fig1_axiom_xi_violation"))
        assert bad and {v.axiom for v in bad} == {"AxiomXI"}
        net = corpus_model("producer_consumer", N=2, BUF=0)
        v = check_safety(net, "safe")
        assert v.status == "Violated" and replays(net, v.trace, "safe")
        with pytest.raises(SimulationRefuted) as info:
            verify_plan(model_path("producer_consumer"), load_plan(plan_path("pc_mutated")))
        return f"{len(bad)} AxiomXI diagnostics; trace of {len(v.trace)} states; refuted at condition {info.value.refuted.condition}"

    run_criterion(capsys, 10, body)
