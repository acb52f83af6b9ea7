"""Syntactic timed automata and networks (after template instantiation)."""

from __future__ import annotations

import dataclasses
import typing as t

from ntacomp.model.expr import TRUE, Expr, conj
from ntacomp.valuations import Var


@dataclasses.dataclass(frozen=True)
class ClockAtom:
    """``clock op bound`` or ``clock - other op bound``."""

    clock: str
    op: str
    bound: int
    other: t.Optional[str] = None

    def clocks(self) -> t.Tuple[str, ...]:
        return (self.clock,) if self.other is None else (self.clock, self.other)


@dataclasses.dataclass(frozen=True)
class Guard:
    """A conjunction of clock atoms and one clock-free data expression."""

    atoms: t.Tuple[ClockAtom, ...] = ()
    data: Expr = TRUE

    @property
    def trivial(self) -> bool:
        return not self.atoms and self.data == TRUE

    def refs(self) -> t.FrozenSet[str]:
        names = set(self.data.refs())
        for a in self.atoms:
            names.update(a.clocks())
        return frozenset(names)

    def data_refs(self) -> t.FrozenSet[str]:
        return self.data.refs()

    def as_expr(self) -> Expr:
        from ntacomp.model.expr import Binary, Const, Ref

        parts: t.List[Expr] = []
        for a in self.atoms:
            lhs: Expr = Ref(a.clock) if a.other is None else Binary("-", Ref(a.clock), Ref(a.other))
            parts.append(Binary(a.op, lhs, Const(a.bound)))
        parts.append(self.data)
        return conj(parts)


TRIVIAL_GUARD = Guard()


@dataclasses.dataclass(frozen=True)
class Label:
    """``tau``, ``send`` or ``recv`` on a channel."""

    kind: str
    channel: t.Optional[str] = None
    broadcast: bool = False

    def __str__(self) -> str:
        if self.kind == "tau":
            return "tau"
        return self.channel + ("!" if self.kind == "send" else "?")

    @property
    def is_input(self) -> bool:
        return self.kind == "recv"


TAU_LABEL = Label("tau")


@dataclasses.dataclass(frozen=True)
class Assign:
    target: str
    value: Expr


@dataclasses.dataclass(frozen=True)
class Edge:
    source: str
    target: str
    guard: Guard = TRIVIAL_GUARD
    label: Label = TAU_LABEL
    updates: t.Tuple[Assign, ...] = ()
    urgent: bool = False

    def written(self) -> t.FrozenSet[str]:
        return frozenset(a.target for a in self.updates)

    def read(self) -> t.FrozenSet[str]:
        names = set(self.guard.refs())
        for a in self.updates:
            names.update(a.value.refs())
        return frozenset(names)


@dataclasses.dataclass(frozen=True)
class TimedAutomaton:
    """A concrete automaton instance.

    ``internal`` holds the local variables (clocks included), ``external`` the
    global variables the automaton mentions.  ``initial`` gives the initial
    value of every variable in ``internal`` and ``external``.
    """

    name: str
    locations: t.Tuple[str, ...]
    initial_location: str
    committed: t.FrozenSet[str]
    internal: t.Tuple[Var, ...]
    external: t.Tuple[Var, ...]
    initial: t.Tuple[t.Tuple[str, t.Any], ...]
    invariants: t.Tuple[t.Tuple[str, Guard], ...]
    edges: t.Tuple[Edge, ...]

    @property
    def loc_name(self) -> str:
        return f"loc({self.name})"

    @property
    def loc_var(self) -> Var:
        return Var(self.loc_name, "loc", locations=self.locations, owner=self.name)

    def invariant(self, location: str) -> Guard:
        for loc, g in self.invariants:
            if loc == location:
                return g
        return TRIVIAL_GUARD

    @property
    def clocks(self) -> t.Tuple[Var, ...]:
        return tuple(v for v in self.internal if v.kind == "clock")

    @property
    def variables(self) -> t.Tuple[Var, ...]:
        return self.internal + self.external

    def initial_values(self) -> t.Dict[str, t.Any]:
        return dict(self.initial)

    def channels(self) -> t.FrozenSet[str]:
        return frozenset(e.label.channel for e in self.edges if e.label.channel is not None)

    def edges_from(self, location: str) -> t.Tuple[Edge, ...]:
        return tuple(e for e in self.edges if e.source == location)

    def local_name(self, flat: str) -> str:
        prefix = self.name + "."
        return flat[len(prefix):] if flat.startswith(prefix) else flat


@dataclasses.dataclass(frozen=True)
class Property:
    name: str
    expr: Expr


@dataclasses.dataclass(frozen=True)
class Network:
    automata: t.Tuple[TimedAutomaton, ...]
    channels: t.Tuple[t.Tuple[str, bool], ...]  # (name, is_broadcast)
    globals: t.Tuple[Var, ...]
    global_initial: t.Tuple[t.Tuple[str, t.Any], ...]
    properties: t.Tuple[Property, ...] = ()
    constants: t.Tuple[t.Tuple[str, int], ...] = ()

    def automaton(self, name: str) -> TimedAutomaton:
        for a in self.automata:
            if a.name == name:
                return a
        raise KeyError(name)

    @property
    def names(self) -> t.Tuple[str, ...]:
        return tuple(a.name for a in self.automata)

    @property
    def broadcast_channels(self) -> t.FrozenSet[str]:
        return frozenset(n for n, b in self.channels if b)

    @property
    def binary_channels(self) -> t.FrozenSet[str]:
        return frozenset(n for n, b in self.channels if not b)

    @property
    def channel_names(self) -> t.FrozenSet[str]:
        return frozenset(n for n, _ in self.channels)

    def is_broadcast(self, channel: str) -> bool:
        return dict(self.channels)[channel]

    def property(self, name: str) -> Property:
        for p in self.properties:
            if p.name == name:
                return p
        raise KeyError(name)

    def variables(self) -> t.Dict[str, Var]:
        """Every variable of the network, including location variables."""
        out: t.Dict[str, Var] = {v.name: v for v in self.globals}
        for a in self.automata:
            for v in a.internal:
                out[v.name] = v
            out[a.loc_name] = a.loc_var
        return out

    def initial_values(self) -> t.Dict[str, t.Any]:
        out = dict(self.global_initial)
        for a in self.automata:
            out.update(a.initial)
            out[a.loc_name] = a.initial_location
        return out

    def constant(self, name: str) -> int:
        return dict(self.constants)[name]

    def replace_automata(self, automata: t.Sequence[TimedAutomaton]) -> "Network":
        return dataclasses.replace(self, automata=tuple(automata))
