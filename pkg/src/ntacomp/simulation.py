"""Timed step simulation between comparable TTSBs, and the side condition
under which simulation survives restriction."""

from __future__ import annotations

import collections
import dataclasses
import itertools
import typing as t

from ntacomp.compose import action_survives
from ntacomp.ttsb import DEFAULT_BUDGET, TTSB, Action, StateSpaceBudgetExceeded
from ntacomp.valuations import Valuation, all_valuations, restrict, update

Pair = t.Tuple[Valuation, Valuation]


class NotComparable(ValueError):
    pass


@dataclasses.dataclass(frozen=True)
class Simulated:
    relation: t.FrozenSet[Pair]
    status: str = "Simulated"

    def __bool__(self) -> bool:
        return True

    @property
    def size(self) -> int:
        return len(self.relation)


@dataclasses.dataclass(frozen=True)
class Refuted:
    """``pair`` is not in any simulation; ``condition`` (1-4) is the one it
    breaks once the pairs it depends on are known to be unrelated.

    ``chain`` follows one failing dependency at a time from the initial pair
    down to a pair that fails on its own."""

    pair: Pair
    condition: int
    detail: str
    chain: t.Tuple[t.Tuple[Pair, int, str], ...] = ()
    status: str = "Refuted"

    def __bool__(self) -> bool:
        return False

    def __str__(self) -> str:
        r, s = self.pair
        return f"condition {self.condition} fails for ({r}, {s}): {self.detail}"


def check_comparable(T1: TTSB, T2: TTSB) -> None:
    if T1.external != T2.external:
        a = sorted(v.name for v in T1.external ^ T2.external)
        raise NotComparable(f"external variables differ: {', '.join(a)}")
    shared = [v.name for v in T1.external if v.kind == "clock"]
    if shared:
        raise NotComparable(f"external clocks are not supported: {', '.join(sorted(shared))}")


class _Game:
    """Pairs reachable from the initial pair, with their obligations.

    Each obligation of a pair is a list of candidate pairs; the pair is in the
    simulation iff every obligation has a candidate that is."""

    def __init__(self, T1: TTSB, T2: TTSB, budget: int) -> None:
        self.T1, self.T2 = T1, T2
        self.ext = T1.external_names
        self.us = list(all_valuations(T1.external)) if T1.external else []
        self.budget = budget
        self.index: t.Dict[Pair, int] = {}
        self.pairs: t.List[Pair] = []
        # per pair: static failure (condition, detail) or None
        self.static: t.List[t.Optional[t.Tuple[int, str]]] = []
        # per pair: list of (condition, detail, candidate indices)
        self.obligations: t.List[t.List[t.Tuple[int, str, t.List[int]]]] = []

    def add(self, p: Pair, queue: t.Deque[int]) -> int:
        i = self.index.get(p)
        if i is None:
            if len(self.pairs) >= self.budget:
                raise StateSpaceBudgetExceeded(self.budget, "state pairs")
            i = len(self.pairs)
            self.index[p] = i
            self.pairs.append(p)
            self.static.append(None)
            self.obligations.append([])
            queue.append(i)
        return i

    def build(self) -> None:
        T1, T2 = self.T1, self.T2
        queue: t.Deque[int] = collections.deque()
        self.add((T1.initial, T2.initial), queue)
        while queue:
            i = queue.popleft()
            r, s = self.pairs[i]
            if restrict(r, self.ext) != restrict(s, self.ext):
                self.static[i] = (1, "external variables differ")
                continue
            if T2.is_committed(s) and not T1.is_committed(r):
                self.static[i] = (3, "right state is committed, left state is not")
                continue
            obs = self.obligations[i]
            for u in self.us:
                ru, su = update(r, u), update(s, u)
                if (ru, su) == (r, s):
                    continue
                obs.append((2, f"after external update {u}", [self.add((ru, su), queue)]))
            s_succ = T2.successors(s)
            for a, b, r2 in T1.successors(r):
                cands = [self.add((r2, s2), queue) for a2, b2, s2 in s_succ if a2 == a and b2 == b]
                if a.kind == "tau":
                    cands.append(self.add((r2, s), queue))
                obs.append((4, _move(a, b, r2), cands))

    def solve(self) -> t.List[bool]:
        n = len(self.pairs)
        good = [self.static[i] is None for i in range(n)]
        counts: t.List[t.List[int]] = []
        watchers: t.Dict[int, t.List[t.Tuple[int, int]]] = collections.defaultdict(list)
        dead: t.Deque[int] = collections.deque(i for i in range(n) if not good[i])
        self.reason: t.Dict[int, t.Tuple[int, str, t.Optional[int]]] = {
            i: (self.static[i][0], self.static[i][1], None) for i in range(n) if self.static[i] is not None  # type: ignore[index]
        }
        for i in range(n):
            cs = []
            for k, (cond, detail, cands) in enumerate(self.obligations[i]):
                cs.append(len(cands))
                for c in cands:
                    watchers[c].append((i, k))
                if not cands and good[i]:
                    good[i] = False
                    self.reason[i] = (cond, detail + ": no matching move", None)
                    dead.append(i)
            counts.append(cs)
        while dead:
            j = dead.popleft()
            for i, k in watchers.get(j, ()):
                if not good[i]:
                    continue
                counts[i][k] -= 1
                if counts[i][k] == 0:
                    good[i] = False
                    cond, detail, cands = self.obligations[i][k]
                    self.reason[i] = (cond, detail, cands[0] if cands else None)
                    dead.append(i)
        return good


def _move(a: Action, b: bool, target: Valuation) -> str:
    return f"{a},{int(b)} --> {target}"


def check_simulation(T1: TTSB, T2: TTSB, budget: int = DEFAULT_BUDGET) -> t.Union[Simulated, Refuted]:
    """Decide ``T1 ≼ T2`` over the pairs reachable from the initial pair.

    The relation is the greatest fixpoint of the four conditions on those
    pairs; pairs outside it never constrain the answer."""
    check_comparable(T1, T2)
    g = _Game(T1, T2, budget)
    g.build()
    good = g.solve()
    if good[0]:
        return Simulated(frozenset(p for p, ok in zip(g.pairs, good) if ok))
    chain = []
    i: t.Optional[int] = 0
    seen = set()
    while i is not None and i not in seen:
        seen.add(i)
        cond, detail, nxt = g.reason[i]
        chain.append((g.pairs[i], cond, detail))
        i = nxt
    p, cond, detail = chain[0]
    return Refuted(p, cond, detail, tuple(chain))


# -- brute-force oracle ---------------------------------------------------------


def _closure(T: TTSB, budget: int) -> t.List[Valuation]:
    states, _ = T.closure(budget)
    return states


def is_simulation(T1: TTSB, T2: TTSB, R: t.AbstractSet[Pair]) -> bool:
    """Whether ``R`` satisfies the four conditions and relates the initial
    states."""
    if (T1.initial, T2.initial) not in R:
        return False
    ext = T1.external_names
    us = list(all_valuations(T1.external)) if T1.external else []
    for r, s in R:
        if restrict(r, ext) != restrict(s, ext):
            return False
        if any((update(r, u), update(s, u)) not in R for u in us):
            return False
        if T2.is_committed(s) and not T1.is_committed(r):
            return False
        s_succ = T2.successors(s)
        for a, b, r2 in T1.successors(r):
            if a.kind == "tau" and (r2, s) in R:
                continue
            if not any(a2 == a and b2 == b and (r2, s2) in R for a2, b2, s2 in s_succ):
                return False
    return True


def brute_force_simulation(T1: TTSB, T2: TTSB, max_pairs: int = 16, budget: int = 1000) -> bool:
    """Search all relations over the closures of both TTSBs (tiny systems
    only: the search is exponential in the number of candidate pairs)."""
    check_comparable(T1, T2)
    ext = T1.external_names
    cand = [
        (r, s)
        for r in _closure(T1, budget)
        for s in _closure(T2, budget)
        if restrict(r, ext) == restrict(s, ext)
    ]
    if len(cand) > max_pairs:
        raise ValueError(f"{len(cand)} candidate pairs exceed the oracle's limit of {max_pairs}")
    init = (T1.initial, T2.initial)
    if init not in cand:
        return False
    rest = [p for p in cand if p != init]
    for k in range(len(rest) + 1):
        for extra in itertools.combinations(rest, k):
            if is_simulation(T1, T2, frozenset((init,) + extra)):
                return True
    return False


# -- side condition -----------------------------------------------------------------


def side_condition_witness(
    T: TTSB,
    names: t.Iterable[str],
    budget: int = DEFAULT_BUDGET,
) -> t.Optional[Valuation]:
    """A committed state of ``T`` none of whose committed transitions
    survives restriction by ``names``, or ``None``.

    States are those of the closure under transitions and external updates,
    which covers every state a simulation from ``T`` can relate."""
    C = frozenset(names)
    for s in _closure(T, budget):
        succ = T.successors(s)
        if not any(b for _, b, _ in succ):
            continue
        if not any(b and action_survives(a, C) for a, b, _ in succ):
            return s
    return None


def check_side_condition(T: TTSB, names: t.Iterable[str], budget: int = DEFAULT_BUDGET) -> bool:
    return side_condition_witness(T, names, budget) is None


def componentwise_side_condition_witness(
    parts: t.Sequence[TTSB],
    budget: int = DEFAULT_BUDGET,
) -> t.Optional[t.Tuple[int, Valuation]]:
    """Sufficient check for the side condition on a composition of ``parts``
    with any restriction set.

    Every committed state of each part, within its closure under transitions
    and external updates, must have a committed ``τ`` or broadcast send.  Such
    a transition survives composition (inputs are always enabled) and
    restriction, and a composed state is committed only if a part is.
    Returns the first part index and state that fails this check.
    """
    for k, T in enumerate(parts):
        for s in _closure(T, budget):
            succ = T.successors(s)
            if not any(b for _, b, _ in succ):
                continue
            if not any(b and (a.kind == "tau" or (a.kind == "send" and a.broadcast)) for a, b, _ in succ):
                return k, s
    return None
