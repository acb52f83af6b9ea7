"""The TTSB of a single timed automaton (rules ACT, TIME and VIRT)."""

from __future__ import annotations

import typing as t

from ntacomp.compile import Layout, guard_fn, tick_fn, update_fn
from ntacomp.model.ast import Network, TimedAutomaton
from ntacomp.ttsb import DELAY, TAU, TTSB, Action, Transition, recv
from ntacomp.valuations import Valuation


def label_action(label) -> Action:
    if label.kind == "tau":
        return TAU
    return Action(label.kind, label.channel, label.broadcast)


class AutomatonTTSB(TTSB):
    """``TTSB(A)`` under the integer-tick interpretation of clocks.

    External variables are the globals the automaton mentions; internal ones
    are its local variables plus the location variable ``loc(A)``.
    """

    def __init__(self, automaton: TimedAutomaton, broadcast: t.Iterable[str]) -> None:
        super().__init__()
        A = automaton
        self.automaton = A
        self.external = frozenset(A.external)
        self.internal = frozenset(A.internal) | {A.loc_var}
        dom = self.domain
        layout = Layout(dom)
        self._loc = layout.pos(A.loc_name)
        self._inv = {loc: guard_fn(A.invariant(loc), layout) for loc in A.locations}
        self._edges: t.Dict[str, t.List[t.Tuple[Action, t.Callable, t.Callable, str, bool]]] = {
            loc: [] for loc in A.locations
        }
        for e in A.edges:
            self._edges[e.source].append(
                (
                    label_action(e.label),
                    guard_fn(e.guard, layout),
                    update_fn(e.updates, layout, [(A.loc_name, e.target)]),
                    e.target,
                    e.urgent,
                )
            )
        self._committed = A.committed
        self._tick = tick_fn(dom)
        self.broadcast = frozenset(broadcast)
        self._virtual = tuple(recv(ch, True) for ch in sorted(self.broadcast))
        self.alphabet = A.channels()
        init = A.initial_values()
        init[A.loc_name] = A.initial_location
        self.initial = Valuation.of(dom, tuple(init[n] for n in dom.names))

    def __repr__(self) -> str:
        return f"TTSB({self.automaton.name})"

    def _successors(self, s: Valuation) -> t.Iterable[Transition]:
        vals = s.values
        dom = self.domain
        loc = vals[self._loc]
        committed = loc in self._committed
        out: t.List[Transition] = []
        heard: t.Set[str] = set()
        urgent = False
        for action, guard, upd, target, is_urgent in self._edges[loc]:
            if not guard(vals):
                continue
            if is_urgent:
                urgent = True
            nv = upd(vals)
            if nv is None or not self._inv[target](nv):
                continue
            out.append((action, committed, Valuation.of(dom, nv)))
            if action.kind == "recv" and action.broadcast:
                heard.add(action.channel)
        if not committed and not urgent:
            nv = self._tick(vals)
            if self._inv[loc](nv):
                out.append((DELAY, False, Valuation.of(dom, nv)))
        for a in self._virtual:
            if a.channel not in heard:
                out.append((a, False, s))
        return out

    def is_state(self, s: Valuation) -> bool:
        if s.domain is not self.domain:
            return False
        for var, value in zip(self.domain.vars, s.values):
            if not var.contains(value):
                return False
        return self._inv[s.values[self._loc]](s.values)


def ttsb_of(
    automaton: TimedAutomaton,
    broadcast: t.Union[None, Network, t.Iterable[str]] = None,
) -> AutomatonTTSB:
    """Build ``TTSB(A)``.  ``broadcast`` is the set of broadcast channels the
    result is input-enabled for (the network's, when a network is given);
    by default the broadcast channels the automaton itself uses."""
    if broadcast is None:
        chans: t.Iterable[str] = {e.label.channel for e in automaton.edges if e.label.broadcast}
    elif isinstance(broadcast, Network):
        chans = broadcast.broadcast_channels
    else:
        chans = broadcast
    return AutomatonTTSB(automaton, chans)


def network_ttsbs(net: Network) -> t.List[AutomatonTTSB]:
    return [AutomatonTTSB(a, net.broadcast_channels) for a in net.automata]
