"""Timed transition systems with broadcast actions (TTSBs).

A TTSB has external variables ``E``, internal variables ``H``, an initial
state and a transition relation whose members carry a committedness bit.
States are :class:`~ntacomp.valuations.Valuation` objects over ``E ∪ H``.

TTSBs are intensional: a subclass supplies :meth:`TTSB._successors`, and the
reachable part is materialized on demand.
"""

from __future__ import annotations

import collections
import dataclasses
import typing as t

from ntacomp.valuations import Domain, Valuation, Var, all_valuations, restrict, time_shift, update

DEFAULT_BUDGET = 5_000_000


class StateSpaceBudgetExceeded(RuntimeError):
    def __init__(self, budget: int, what: str = "states") -> None:
        super().__init__(f"more than {budget} {what}; raise the budget to continue")
        self.budget = budget


class UnknownState(KeyError):
    pass


class Action(t.NamedTuple):
    """``tau``, ``delay`` (one time unit), ``send`` or ``recv`` on a channel."""

    kind: str
    channel: t.Optional[str] = None
    broadcast: bool = False

    def __str__(self) -> str:
        if self.kind == "tau":
            return "tau"
        if self.kind == "delay":
            return "delay(1)"
        return f"{self.channel}{'!' if self.kind == 'send' else '?'}"

    @property
    def is_channel(self) -> bool:
        return self.channel is not None


TAU = Action("tau")
DELAY = Action("delay")


def send(channel: str, broadcast: bool = False) -> Action:
    return Action("send", channel, broadcast)


def recv(channel: str, broadcast: bool = False) -> Action:
    return Action("recv", channel, broadcast)


Transition = t.Tuple[Action, bool, Valuation]


class TTSB:
    """Base class.  Subclasses set the attributes below and implement
    :meth:`_successors` (and usually :meth:`is_state`).

    ``broadcast`` is the set of broadcast channels the TTSB is input-enabled
    for; ``alphabet`` is the set of channels its transitions may use.
    """

    external: t.FrozenSet[Var]
    internal: t.FrozenSet[Var]
    initial: Valuation
    broadcast: t.FrozenSet[str]
    alphabet: t.FrozenSet[str]

    def __init__(self) -> None:
        self._succ: t.Dict[Valuation, t.Tuple[Transition, ...]] = {}

    # -- to override -------------------------------------------------------
    def _successors(self, s: Valuation) -> t.Iterable[Transition]:
        raise NotImplementedError

    def is_state(self, s: Valuation) -> bool:
        return s.domain is self.domain

    # -- derived -------------------------------------------------------------
    @property
    def domain(self) -> Domain:
        d = self.__dict__.get("_domain")
        if d is None:
            d = Domain(self.external | self.internal)
            self.__dict__["_domain"] = d
        return d

    @property
    def variables(self) -> t.FrozenSet[Var]:
        return self.external | self.internal

    @property
    def external_names(self) -> t.FrozenSet[str]:
        return frozenset(v.name for v in self.external)

    @property
    def internal_names(self) -> t.FrozenSet[str]:
        return frozenset(v.name for v in self.internal)

    def successors(self, s: Valuation) -> t.Tuple[Transition, ...]:
        out = self._succ.get(s)
        if out is None:
            out = tuple(dict.fromkeys(self._successors(s)))
            self._succ[s] = out
        return out

    def is_committed(self, s: Valuation, check: bool = False) -> bool:
        """``Comm(s)``: some committed transition leaves ``s``."""
        if check and not self.is_state(s):
            raise UnknownState(s)
        for _, b, _ in self.successors(s):
            if b:
                return True
        return False

    def clear_cache(self) -> None:
        self._succ.clear()

    def reachable(self, budget: int = DEFAULT_BUDGET) -> t.List[Valuation]:
        """States reachable from the initial state, in breadth-first order."""
        seen = {self.initial: None}
        queue = collections.deque([self.initial])
        order = []
        while queue:
            s = queue.popleft()
            order.append(s)
            for _, _, target in self.successors(s):
                if target not in seen:
                    if len(seen) >= budget:
                        raise StateSpaceBudgetExceeded(budget)
                    seen[target] = None
                    queue.append(target)
        return order

    def closure(self, budget: int = DEFAULT_BUDGET) -> t.Tuple[t.List[Valuation], t.List[t.Tuple[Valuation, Valuation]]]:
        """States reachable through transitions and external updates ``s[u]``.

        Returns the states (each a member of the TTSB) and the pairs
        ``(s, s[u])`` where ``s[u]`` is not a state.
        """
        ext = list(all_valuations(self.external)) if self.external else []
        seen = {self.initial: None}
        queue = collections.deque([self.initial])
        order = []
        bad = []

        def visit(x: Valuation) -> None:
            if x not in seen:
                if len(seen) >= budget:
                    raise StateSpaceBudgetExceeded(budget)
                seen[x] = None
                queue.append(x)

        while queue:
            s = queue.popleft()
            order.append(s)
            for _, _, target in self.successors(s):
                visit(target)
            for u in ext:
                su = update(s, u)
                if su in seen:
                    continue
                if self.is_state(su):
                    visit(su)
                else:
                    bad.append((s, su))
        return order, bad


class ExplicitTTSB(TTSB):
    """A TTSB given by an explicit transition table."""

    def __init__(
        self,
        external: t.Iterable[Var],
        internal: t.Iterable[Var],
        initial: Valuation,
        transitions: t.Mapping[Valuation, t.Iterable[Transition]],
        states: t.Optional[t.Iterable[Valuation]] = None,
        broadcast: t.Iterable[str] = (),
        alphabet: t.Optional[t.Iterable[str]] = None,
    ) -> None:
        super().__init__()
        self.external = frozenset(external)
        self.internal = frozenset(internal)
        if self.external & self.internal:
            raise ValueError("external and internal variables overlap")
        self.initial = initial
        self.table = {s: tuple(ts) for s, ts in transitions.items()}
        if states is None:
            found = {initial}
            for s, ts in self.table.items():
                found.add(s)
                found.update(tgt for _, _, tgt in ts)
            self.states = frozenset(found)
        else:
            self.states = frozenset(states)
        self.broadcast = frozenset(broadcast)
        if alphabet is None:
            alphabet = {a.channel for ts in self.table.values() for a, _, _ in ts if a.channel is not None}
        self.alphabet = frozenset(alphabet)
        for s in self.states:
            if s.domain is not self.domain:
                raise ValueError(f"state {s} is not a valuation over the TTSB's variables")

    def _successors(self, s: Valuation) -> t.Iterable[Transition]:
        return self.table.get(s, ())

    def is_state(self, s: Valuation) -> bool:
        return s in self.states


@dataclasses.dataclass(frozen=True)
class LTS:
    states: t.FrozenSet[Valuation]
    initial: Valuation
    transitions: t.FrozenSet[t.Tuple[Valuation, Action, Valuation]]

    def successors(self) -> t.Dict[Valuation, t.Set[t.Tuple[Action, Valuation]]]:
        out: t.Dict[Valuation, t.Set[t.Tuple[Action, Valuation]]] = {s: set() for s in self.states}
        for s, a, tgt in self.transitions:
            out[s].add((a, tgt))
        return out


def underlying_lts(T: TTSB, budget: int = DEFAULT_BUDGET) -> LTS:
    """``LTS(T)`` restricted to the reachable states, committedness dropped."""
    states = T.reachable(budget)
    trans = set()
    for s in states:
        for a, _, tgt in T.successors(s):
            trans.add((s, a, tgt))
    return LTS(frozenset(states), T.initial, frozenset(trans))


def transition_set(T: TTSB, budget: int = DEFAULT_BUDGET) -> t.FrozenSet[tuple]:
    """Reachable transitions with committedness, keyed by variable names so
    that TTSBs built with differently ordered domains compare equal."""

    def key(v: Valuation) -> t.FrozenSet[t.Tuple[str, t.Any]]:
        return frozenset(v.items())

    return frozenset(
        (key(s), a, b, key(tgt)) for s in T.reachable(budget) for a, b, tgt in T.successors(s)
    )


def reachable_states(T: TTSB, budget: int = DEFAULT_BUDGET) -> t.Set[Valuation]:
    return set(T.reachable(budget))


@dataclasses.dataclass(frozen=True)
class AxiomViolation:
    axiom: str
    state: Valuation
    detail: str

    def __str__(self) -> str:
        return f"Axiom {self.axiom} at {self.state}: {self.detail}"


def check_ttsb_axioms(T: TTSB, budget: int = DEFAULT_BUDGET, limit: int = 50) -> t.List[AxiomViolation]:
    """Check Axioms I-VI over the closure of the initial state under
    transitions and external updates.  At most ``limit`` violations are
    reported (0 means no limit)."""
    out: t.List[AxiomViolation] = []

    def report(axiom: str, s: Valuation, detail: str) -> bool:
        out.append(AxiomViolation(axiom, s, detail))
        return bool(limit) and len(out) >= limit

    if T.external & T.internal:
        report("E∩H", T.initial, "external and internal variables overlap")
    if not T.is_state(T.initial):
        report("s0", T.initial, "initial valuation is not a state")
        return out
    states, bad = T.closure(budget)
    for s, su in bad:
        if report("II", s, f"s[u] = {su} is not a state"):
            return out
    ext_names = T.external_names
    # states differing only in external values: the closure holds every
    # s[u] that is a state, so Axiom III asks for one input set per group
    groups: t.Dict[Valuation, t.Dict[t.FrozenSet[t.Tuple[Action, bool]], Valuation]] = {}
    for s in states:
        succ = T.successors(s)
        committed = any(b for _, b, _ in succ)
        for a, b, tgt in succ:
            if committed and not (a.is_channel or (a.kind == "tau" and b)):
                if report("I", s, f"committed state has {a} with committed={b}"):
                    return out
            if a.kind == "delay":
                if b:
                    if report("I", s, "delay transitions must be uncommitted"):
                        return out
                if tgt != time_shift(s, 1):
                    if report("IV", s, f"delay leads to {tgt}, expected {time_shift(s, 1)}"):
                        return out
            if a.kind == "recv" and a.broadcast:
                if restrict(tgt, ext_names) != restrict(s, ext_names):
                    if report("VI", s, f"{a} changes external variables (target {tgt})"):
                        return out
        if ext_names:
            key = restrict(s, T.internal_names)
            groups.setdefault(key, {}).setdefault(frozenset((a, b) for a, b, _ in succ if a.kind == "recv"), s)
        have = {a.channel for a, _, _ in succ if a.kind == "recv" and a.broadcast}
        for ch in sorted(T.broadcast - have):
            if report("V", s, f"no {ch}? transition"):
                return out
    for by_inputs in groups.values():
        if len(by_inputs) < 2:
            continue
        for A_in, s in by_inputs.items():
            for B_in, su in by_inputs.items():
                missing = A_in - B_in
                if missing:
                    a, b = sorted(missing, key=str)[0]
                    if report("III", s, f"{a} (committed={b}) is not enabled at {su}"):
                        return out
                    break
    return out


def enabled_channels(T: TTSB, budget: int = DEFAULT_BUDGET) -> t.FrozenSet[str]:
    """``Σ(T)``: channels on transitions reachable in ``T``, excluding the
    input self-loops that only witness input-enabledness."""
    out: t.Set[str] = set()
    for s in T.reachable(budget):
        for a, b, tgt in T.successors(s):
            if a.channel is not None and a.channel in T.alphabet:
                out.add(a.channel)
    return frozenset(out)
