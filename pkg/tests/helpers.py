"""Shared test helpers and reference implementations."""

from __future__ import annotations

import functools
import itertools
import random
import typing as t

from ntacomp.corpus import model_path
from ntacomp.corpus.generate import delete_transitions, random_ttsb, shared_pool
from ntacomp.model.ast import Network
from ntacomp.model.parser import load_model
from ntacomp.simulation import check_simulation
from ntacomp.ttsb import ExplicitTTSB
from ntacomp.valuations import Valuation, compatible, int_var, merge, override, restrict, update

# reduced WSN timing profile used wherever the full constants would be slow
WSN_REDUCED = {"MIN": 3, "MAX": 4, "K0": 5, "G": 2, "T": 1}


@functools.lru_cache(maxsize=None)
def _cached(name: str, params: t.Tuple[t.Tuple[str, int], ...]) -> Network:
    return load_model(str(model_path(name)), dict(params))


def corpus_model(name: str, **params: int) -> Network:
    return _cached(name, tuple(sorted(params.items())))


def ttsb_family(rng: random.Random, names: t.Sequence[str], n_ext: int = 1, **kw: t.Any) -> t.List[ExplicitTTSB]:
    """Pairwise compatible random TTSBs over one shared pool and a common
    set of channels."""
    pool = shared_pool(n_ext)
    out = []
    for name in names:
        ext = [v for v in pool if rng.random() < 0.7]
        out.append(
            random_ttsb(
                rng,
                name,
                ext,
                binary=["a"],
                broadcast=["d"],
                locations=kw.get("locations", rng.randint(1, 2)),
                ceiling=kw.get("ceiling", rng.choice([0, 0, 2])),
            )
        )
    return out



def simulated_pair(rng: random.Random, ext: t.Sequence[t.Any], tries: int = 20) -> t.Tuple[ExplicitTTSB, ExplicitTTSB]:
    """``(T1, T2)`` with ``T1 ≼ T2``: half the time ``T1`` is ``T2`` with
    transitions deleted, otherwise an independent draw that happens to be
    simulated (falling back to deletion after ``tries`` misses)."""
    kw: t.Dict[str, t.Any] = dict(binary=["a"], broadcast=["d"])
    T2 = random_ttsb(rng, "P", ext, locations=rng.randint(1, 3), ceiling=rng.choice([0, 2]), **kw)
    if rng.random() < 0.5:
        return delete_transitions(rng, T2), T2
    for _ in range(tries):
        T1 = random_ttsb(rng, "P", ext, locations=rng.randint(1, 3), **kw)
        if check_simulation(T1, T2):
            return T1, T2
    return delete_transitions(rng, T2), T2

# dict-based reference semantics of the valuation operators


def ref_override(f: dict, g: dict) -> dict:
    out = dict(g)
    out.update(f)
    return out


def ref_update(f: dict, g: dict) -> dict:
    return {z: (g[z] if z in g else f[z]) for z in f}


def ref_compatible(f: dict, g: dict) -> bool:
    return all(f[z] == g[z] for z in f.keys() & g.keys())


def ref_restrict(f: dict, X: t.Iterable[str]) -> dict:
    X = set(X)
    return {z: v for z, v in f.items() if z in X}


def exhaustive_failures(
    maps: t.Sequence[Valuation],
    names: t.Iterable[str],
    override: t.Callable[[Valuation, Valuation], Valuation] = override,
) -> t.Dict[str, int]:
    """Counterexamples to the seven algebraic properties over every pair or
    triple drawn from ``maps``, which must be closed under the operators.

    Each operator is evaluated once per pair and tabulated; the triples are
    then checked by table lookup."""
    idx = {v: i for i, v in enumerate(maps)}
    n = range(len(maps))
    subsets = [set(c) for k in range(len(set(names)) + 1) for c in itertools.combinations(sorted(set(names)), k)]
    comp = [[compatible(f, g) for g in maps] for f in maps]
    ov = [[idx[override(f, g)] for g in maps] for f in maps]
    up = [[idx[update(f, g)] for g in maps] for f in maps]
    mg = [[idx[merge(f, g)] if comp[i][j] else -1 for j, g in enumerate(maps)] for i, f in enumerate(maps)]
    rs = [[idx[restrict(f, X)] for X in subsets] for f in maps]
    bad = dict.fromkeys("1234567", 0)
    for f in n:
        cf, upf = comp[f], up[f]
        for g in n:
            bad["1"] += not cf[up[g][f]]
            bad["3"] += ov[f][g] != (mg[f][up[g][f]] if cf[up[g][f]] else -2)
            bad["6"] += sum(cf[g] and not comp[x][g] for x in rs[f])
            fg = cf[g]
            m = mg[f][g]
            upfg, ovfg = up[upf[g]], ov[f][g]
            for h in n:
                lhs = fg and comp[m][h]
                rhs = fg and cf[h] and comp[g][h]
                bad["2"] += lhs != rhs
                bad["4"] += upfg[h] != upf[ov[h][g]]
                bad["5"] += up[ovfg][h] != ov[upf[h]][up[g][h]]
                bad["7"] += fg and cf[h] and not cf[ov[g][h]]
    return bad


# partial maps over x, y, z with values 1..3, and the seven algebraic
# properties of the valuation operators

POOL = {n: int_var(n, 1, 3) for n in "xyz"}


def val(**kw: int) -> Valuation:
    return Valuation({POOL[k]: v for k, v in kw.items()})


ALL_MAPS = [
    val(**dict(zip(keys, values)))
    for k in range(4)
    for keys in itertools.combinations("xyz", k)
    for values in itertools.product((1, 2, 3), repeat=k)
]


def random_map(rng: random.Random) -> Valuation:
    return val(**{n: rng.randint(1, 3) for n in "xyz" if rng.random() < 0.6})


def p1(f, g):
    return compatible(f, update(g, f))


def p2(f, g, h):
    lhs = compatible(f, g) and compatible(merge(f, g), h)
    rhs = compatible(f, g) and compatible(f, h) and compatible(g, h)
    return lhs == rhs


def p3(f, g):
    return override(f, g) == merge(f, update(g, f))


def p4(f, g, h):
    return update(update(f, g), h) == update(f, override(h, g))


def p5(f, g, h):
    return update(override(f, g), h) == override(update(f, h), update(g, h))


def p6(f, g, X):
    return not compatible(f, g) or compatible(restrict(f, X), g)


def p7(f, g, h):
    return not (compatible(f, g) and compatible(f, h)) or compatible(f, override(g, h))
