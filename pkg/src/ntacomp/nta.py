"""The two semantics of a network of timed automata.

:class:`NetworkEngine` implements the direct (monolithic) rules TAU, SYNC,
BCST and TIME over value tuples; :func:`compositional_lts` goes through the
TTSB of every automaton, parallel composition and restriction.
"""

from __future__ import annotations

import collections
import dataclasses
import itertools
import typing as t

from ntacomp.compile import Layout, guard_fn, tick_fn, update_fn
from ntacomp.compose import parallel_all, restrict_ttsb
from ntacomp.model.ast import Network
from ntacomp.semantics import network_ttsbs
from ntacomp.ttsb import DEFAULT_BUDGET, DELAY, LTS, TAU, StateSpaceBudgetExceeded, underlying_lts
from ntacomp.valuations import Domain, Valuation, restrict


class ReceiverOrderDependence(RuntimeError):
    """Broadcast receivers' updates gave different results in different
    orders (the model cannot satisfy Axiom XI)."""


@dataclasses.dataclass
class _Edge:
    kind: str
    channel: t.Optional[str]
    broadcast: bool
    guard: t.Callable[[tuple], bool]
    update: t.Callable[[tuple], t.Optional[tuple]]
    source: str
    target: str
    urgent: bool
    text: str


@dataclasses.dataclass(frozen=True)
class Step:
    """One monolithic transition with enough detail to explain it."""

    action: str  # "tau" or "delay"
    rule: str  # TAU, SYNC, BCST or TIME
    moves: t.Tuple[t.Tuple[str, str], ...]  # (automaton, edge text)
    channel: t.Optional[str] = None

    def __str__(self) -> str:
        if self.rule == "TIME":
            return "delay(1)"
        head = self.rule if self.channel is None else f"{self.rule} {self.channel}"
        return head + ": " + "; ".join(f"{a} {e}" for a, e in self.moves)


class NetworkEngine:
    """Compiled successor function for the monolithic semantics."""

    def __init__(self, net: Network) -> None:
        self.net = net
        variables = net.variables()
        self.domain = Domain(variables.values())
        layout = Layout(self.domain)
        self.layout = layout
        self.n = len(net.automata)
        self.loc_pos = [layout.pos(a.loc_name) for a in net.automata]
        self.committed = [a.committed for a in net.automata]
        self.names = [a.name for a in net.automata]
        self.edges: t.List[t.Dict[str, t.List[_Edge]]] = []
        self.inputs: t.List[t.Dict[t.Tuple[str, str], t.List[_Edge]]] = []
        self.urgent: t.List[t.Dict[str, t.List[_Edge]]] = []
        self.local_inv: t.List[t.Dict[str, t.Callable[[tuple], bool]]] = []
        for a in net.automata:
            per: t.Dict[str, t.List[_Edge]] = {loc: [] for loc in a.locations}
            inp: t.Dict[t.Tuple[str, str], t.List[_Edge]] = {}
            urg: t.Dict[str, t.List[_Edge]] = {loc: [] for loc in a.locations}
            for e in a.edges:
                ce = _Edge(
                    e.label.kind,
                    e.label.channel,
                    e.label.broadcast,
                    guard_fn(e.guard, layout),
                    update_fn(e.updates, layout, [(a.loc_name, e.target)]),
                    e.source,
                    e.target,
                    e.urgent,
                    f"{e.source} -> {e.target} [{e.label}]",
                )
                per[e.source].append(ce)
                if ce.kind == "recv":
                    inp.setdefault((e.source, ce.channel), []).append(ce)
                if ce.urgent:
                    urg[e.source].append(ce)
            self.edges.append(per)
            self.inputs.append(inp)
            self.urgent.append(urg)
            self.local_inv.append({loc: guard_fn(a.invariant(loc), layout) for loc in a.locations})
        self._tick = tick_fn(self.domain)
        init = net.initial_values()
        self.initial = tuple(init[name] for name in self.domain.names)

    # -- helpers -----------------------------------------------------------
    def valuation(self, values: tuple) -> Valuation:
        return Valuation.of(self.domain, values)

    def invariants_hold(self, s: tuple) -> bool:
        for i in range(self.n):
            if not self.local_inv[i][s[self.loc_pos[i]]](s):
                return False
        return True

    def any_committed(self, s: tuple) -> bool:
        for i in range(self.n):
            if s[self.loc_pos[i]] in self.committed[i]:
                return True
        return False

    # -- successor function ------------------------------------------------
    def successors(self, s: tuple) -> t.List[t.Tuple[bool, tuple]]:
        """``(is_delay, target)`` pairs, duplicates possible."""
        return [(step.action == "delay", tgt) for step, tgt in self.steps(s, describe=False)]

    def steps(self, s: tuple, describe: bool = True) -> t.Iterator[t.Tuple[t.Optional[Step], tuple]]:
        n = self.n
        locs = [s[p] for p in self.loc_pos]
        comm = [locs[i] in self.committed[i] for i in range(n)]
        any_comm = any(comm)
        inv_ok = self.invariants_hold
        for i in range(n):
            li = locs[i]
            for e in self.edges[i][li]:
                if e.kind == "recv" or not e.guard(s):
                    continue
                if e.kind == "tau":
                    if any_comm and not comm[i]:
                        continue
                    s2 = e.update(s)
                    if s2 is not None and inv_ok(s2):
                        yield (Step("tau", "TAU", ((self.names[i], e.text),)) if describe else _TAU_STEP), s2
                elif not e.broadcast:
                    for j in range(n):
                        if j == i:
                            continue
                        for r in self.inputs[j].get((locs[j], e.channel), ()):
                            if not r.guard(s):
                                continue
                            if any_comm and not (comm[i] or comm[j]):
                                continue
                            s1 = e.update(s)
                            if s1 is None:
                                break
                            s2 = r.update(s1)
                            if s2 is not None and inv_ok(s2):
                                step = (
                                    Step("tau", "SYNC", ((self.names[i], e.text), (self.names[j], r.text)), e.channel)
                                    if describe
                                    else _TAU_STEP
                                )
                                yield step, s2
                else:
                    yield from self._broadcast(s, i, e, locs, comm, any_comm, describe)
        if any_comm:
            return
        for i in range(n):
            for e in self.urgent[i][locs[i]]:
                if e.guard(s):
                    return
        s2 = self._tick(s)
        if inv_ok(s2):
            yield (Step("delay", "TIME", ()) if describe else _DELAY_STEP), s2

    def _broadcast(self, s, i, e, locs, comm, any_comm, describe):
        s1 = e.update(s)
        if s1 is None:
            return
        # RS: automata with an executable input edge, where executable also
        # requires the receiver's own target to be a valuation satisfying
        # its invariant (mirrors rule ACT on the compositional side)
        receivers: t.List[t.Tuple[int, t.List[_Edge]]] = []
        for j in range(self.n):
            if j == i:
                continue
            cands = []
            inv_j = self.local_inv[j]
            for r in self.inputs[j].get((locs[j], e.channel), ()):
                if not r.guard(s):
                    continue
                tj = r.update(s1)
                if tj is not None and inv_j[r.target](tj):
                    cands.append(r)
            if cands:
                receivers.append((j, cands))
        if any_comm and not (comm[i] or any(comm[j] for j, _ in receivers)):
            return
        for choice in itertools.product(*(c for _, c in receivers)):
            s2 = s1
            for r in choice:
                s2 = r.update(s2)
                if s2 is None:
                    break
            if s2 is None:
                continue
            if len(choice) > 1:
                s3 = s1
                for r in reversed(choice):
                    s3 = r.update(s3)
                    if s3 is None:
                        break
                if s3 != s2:
                    raise ReceiverOrderDependence(
                        f"broadcast on {e.channel} from {self.names[i]}: receiver updates do not commute"
                    )
            if not self.invariants_hold(s2):
                continue
            if describe:
                moves = ((self.names[i], e.text),) + tuple(
                    (self.names[j], r.text) for (j, _), r in zip(receivers, choice)
                )
                yield Step("tau", "BCST", moves, e.channel), s2
            else:
                yield _TAU_STEP, s2

    # -- exploration ---------------------------------------------------------
    def explore(
        self,
        budget: int = DEFAULT_BUDGET,
        stop: t.Optional[t.Callable[[tuple], bool]] = None,
    ) -> "Exploration":
        """Breadth-first search from the initial state.

        If ``stop`` returns true for a state the search ends there and the
        state is reported as ``hit``.
        """
        init = self.initial
        parent: t.Dict[tuple, t.Optional[tuple]] = {init: None}
        if stop is not None and stop(init):
            return Exploration(parent, init, 0)
        queue = collections.deque([init])
        edges = 0
        steps = self.steps
        while queue:
            s = queue.popleft()
            for _, tgt in steps(s, describe=False):
                edges += 1
                if tgt in parent:
                    continue
                if len(parent) >= budget:
                    raise StateSpaceBudgetExceeded(budget)
                parent[tgt] = s
                if stop is not None and stop(tgt):
                    return Exploration(parent, tgt, edges)
                queue.append(tgt)
        return Exploration(parent, None, edges)

    def trace_to(self, parent: t.Mapping[tuple, t.Optional[tuple]], goal: tuple) -> t.List[t.Tuple[tuple, t.Optional[Step]]]:
        """States from the initial one to ``goal``, each paired with the
        step that leaves it (``None`` for the last)."""
        path = [goal]
        while parent[path[-1]] is not None:
            path.append(parent[path[-1]])  # type: ignore[arg-type]
        path.reverse()
        out: t.List[t.Tuple[tuple, t.Optional[Step]]] = []
        for a, b in zip(path, path[1:]):
            step = next(st for st, tgt in self.steps(a) if tgt == b)
            out.append((a, step))
        out.append((path[-1], None))
        return out


_TAU_STEP = Step("tau", "TAU", ())
_DELAY_STEP = Step("delay", "TIME", ())


@dataclasses.dataclass
class Exploration:
    parent: t.Dict[tuple, t.Optional[tuple]]
    hit: t.Optional[tuple]
    edges: int

    @property
    def states(self) -> int:
        return len(self.parent)


def monolithic_lts(net: Network, budget: int = DEFAULT_BUDGET) -> LTS:
    eng = NetworkEngine(net)
    ex = eng.explore(budget)
    trans = set()
    V = eng.valuation
    for s in ex.parent:
        src = V(s)
        for step, tgt in eng.steps(s, describe=False):
            trans.add((src, DELAY if step.action == "delay" else TAU, V(tgt)))
    return LTS(frozenset(V(s) for s in ex.parent), V(eng.initial), frozenset(trans))


def compositional_ttsb(net: Network):
    """``(TTSB(A1) ‖ ... ‖ TTSB(An)) \\ (Δ ∪ 𝒞)``."""
    parts = network_ttsbs(net)
    return restrict_ttsb(parallel_all(parts), net.channel_names, channels=net.channel_names)


def compositional_lts(net: Network, budget: int = DEFAULT_BUDGET) -> LTS:
    return underlying_lts(compositional_ttsb(net), budget)


@dataclasses.dataclass(frozen=True)
class Equal:
    states: int
    transitions: int
    status: str = "Equal"


@dataclasses.dataclass(frozen=True)
class Counterexample:
    """A state present on one side only, or a transition present on one
    side only (``side`` names the side that has it)."""

    side: str
    state: Valuation
    transition: t.Optional[t.Tuple[str, Valuation]]
    states_lhs: int
    states_rhs: int
    status: str = "Counterexample"

    def __str__(self) -> str:
        if self.transition is None:
            return f"state {self.state} only in the {self.side} semantics"
        a, tgt = self.transition
        return f"transition {self.state} --{a}--> {tgt} only in the {self.side} semantics"


def check_semantics_equivalence(
    net: Network,
    budget: int = DEFAULT_BUDGET,
    engine: str = "python",
) -> t.Union[Equal, Counterexample]:
    """Compare the monolithic LTS (lhs) with the compositional one (rhs) for
    literal equality of reachable states and transitions.

    ``engine="fast"`` uses the compiled backend, which walks the monolithic
    state space and compares both successor sets at every state (equal
    successor sets everywhere from a common initial state imply equal
    reachable fragments)."""
    if engine == "fast":
        return _fast_equivalence(net, budget)
    if engine != "python":
        raise ValueError(f"unknown engine {engine!r}")
    lhs = monolithic_lts(net, budget)
    rhs = compositional_lts(net, budget)
    dom = next(iter(rhs.states)).domain
    if next(iter(lhs.states)).domain is not dom:
        # globals nobody mentions exist only in the monolithic state space
        proj = {s: restrict(s, dom) for s in lhs.states}
        lhs = LTS(
            frozenset(proj.values()),
            proj[lhs.initial],
            frozenset((proj[a], x, proj[b]) for a, x, b in lhs.transitions),
        )
    nl, nr = len(lhs.states), len(rhs.states)
    for name, mine, other in (("monolithic", lhs, rhs), ("compositional", rhs, lhs)):
        extra = sorted(mine.states - other.states, key=Valuation.sort_key)
        if extra:
            return Counterexample(name, extra[0], None, nl, nr)
    for name, mine, other in (("monolithic", lhs, rhs), ("compositional", rhs, lhs)):
        extra_t = sorted(mine.transitions - other.transitions, key=lambda x: (x[0].sort_key(), str(x[1]), x[2].sort_key()))
        if extra_t:
            s, a, tgt = extra_t[0]
            return Counterexample(name, s, (str(a), tgt), nl, nr)
    return Equal(nl, len(lhs.transitions))


def _fast_equivalence(net: Network, budget: int) -> t.Union[Equal, Counterexample]:
    from ntacomp.fast.engine import BUDGET, COMPARE, DIFFERENT, FastEngine

    fe = FastEngine(net)
    res = fe.run(COMPARE, budget=budget)
    if res.status == BUDGET:
        raise StateSpaceBudgetExceeded(budget)
    if res.status == DIFFERENT:
        assert res.diff is not None and res.hit is not None
        side, target, label = res.diff
        V = lambda x: Valuation.of(fe.domain, x)  # noqa: E731
        return Counterexample(
            side,
            V(fe.decode(res.packed[res.hit])),
            ("delay(1)" if label else "tau", V(fe.decode(target))),
            res.states,
            res.states,
        )
    return Equal(res.states, res.edges)
