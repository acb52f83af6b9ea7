"""Parallel composition and restriction of TTSBs."""

from __future__ import annotations

import contextlib
import typing as t

from ntacomp.ttsb import TAU, TTSB, Action, Transition
from ntacomp.valuations import Domain, Valuation, compatible, merge, override, restrict, underride, update


class IncompatibleTTSBs(ValueError):
    pass


class UnknownChannelOrVariable(ValueError):
    pass


# Deliberate rule mutations, only for testing that the checkers can catch
# a broken composition.  Known names:
#   "snd-stale-receiver"  receiver of a composed broadcast reads s, not s[r']
#   "snd-comm-condition"  SND also requires Comm(r) or Comm(s) => b or b'
MUTATIONS: t.Set[str] = set()

KNOWN_MUTATIONS = frozenset({"snd-stale-receiver", "snd-comm-condition"})


@contextlib.contextmanager
def mutation(name: str) -> t.Iterator[None]:
    if name not in KNOWN_MUTATIONS:
        raise ValueError(f"unknown mutation {name!r}")
    MUTATIONS.add(name)
    try:
        yield
    finally:
        MUTATIONS.discard(name)


class Parallel(TTSB):
    """``T1 ‖ T2``."""

    def __init__(self, left: TTSB, right: TTSB) -> None:
        super().__init__()
        clash = (left.internal & right.variables) | (right.internal & left.variables)
        if clash:
            names = ", ".join(sorted(v.name for v in clash))
            raise IncompatibleTTSBs(f"internal variables shared with the other component: {names}")
        if not compatible(left.initial, right.initial):
            raise IncompatibleTTSBs("initial states disagree on shared variables")
        self.left = left
        self.right = right
        self.external = left.external | right.external
        self.internal = left.internal | right.internal
        self.initial = merge(left.initial, right.initial)
        # a composed TTSB can only receive a broadcast both parts can receive
        self.broadcast = left.broadcast & right.broadcast
        self.alphabet = left.alphabet | right.alphabet
        self.mutations = frozenset(MUTATIONS)

    def __repr__(self) -> str:
        return f"({self.left!r} ‖ {self.right!r})"

    def split(self, s: Valuation) -> t.Tuple[Valuation, Valuation]:
        return restrict(s, self.left.domain), restrict(s, self.right.domain)

    def is_state(self, s: Valuation) -> bool:
        if s.domain is not self.domain:
            return False
        r, q = self.split(s)
        return self.left.is_state(r) and self.right.is_state(q)

    def _successors(self, s: Valuation) -> t.Iterable[Transition]:
        r, q = self.split(s)
        out: t.List[Transition] = []
        self._half(self.left, r, self.right, q, s, out)
        self._half(self.right, q, self.left, r, s, out)
        # TIME and RCV are symmetric: generate them once
        rs = self.left.successors(r)
        qs = self.right.successors(q)
        q_delays = [tgt for a, _, tgt in qs if a.kind == "delay"]
        q_inputs: t.Dict[str, t.List[t.Tuple[bool, Valuation]]] = {}
        for a, b, tgt in qs:
            if a.kind == "recv" and a.broadcast:
                q_inputs.setdefault(a.channel, []).append((b, tgt))
        for a, b, tgt in rs:
            if a.kind == "delay" and not b:
                for q2 in q_delays:
                    out.append((a, False, merge(tgt, q2)))
            elif a.kind == "recv" and a.broadcast:
                for b2, q2 in q_inputs.get(a.channel, ()):
                    out.append((a, b or b2, merge(tgt, q2)))
        return out

    def _half(
        self,
        Ti: TTSB,
        r: Valuation,
        Tj: TTSB,
        q: Valuation,
        s: Valuation,
        out: t.List[Transition],
    ) -> None:
        comm_j: t.Optional[bool] = None
        comm_i: t.Optional[bool] = None
        for a, b, r2 in Ti.successors(r):
            kind = a.kind
            if kind == "tau":
                if b:
                    out.append((a, True, override(r2, s)))
                else:
                    if comm_j is None:
                        comm_j = Tj.is_committed(q)
                    if not comm_j:
                        out.append((a, False, override(r2, s)))
            elif kind == "delay":
                continue
            elif not a.broadcast:
                # EXT
                out.append((a, b, override(r2, s)))
                if kind == "send":
                    q_upd = update(q, r2)
                    if comm_i is None:
                        comm_i = any(bb for _, bb, _ in Ti.successors(r))
                    if comm_j is None:
                        comm_j = Tj.is_committed(q)
                    for a2, b2, q2 in Tj.successors(q_upd):
                        if a2.kind == "recv" and not a2.broadcast and a2.channel == a.channel:
                            bb = b or b2
                            if (comm_i or comm_j) and not bb:
                                continue
                            out.append((TAU, bb, underride(r2, q2)))
            elif kind == "send":
                # SND
                src = q if "snd-stale-receiver" in self.mutations else update(q, r2)
                check = "snd-comm-condition" in self.mutations
                if check:
                    if comm_i is None:
                        comm_i = any(bb for _, bb, _ in Ti.successors(r))
                    if comm_j is None:
                        comm_j = Tj.is_committed(q)
                for a2, b2, q2 in Tj.successors(src):
                    if a2.kind == "recv" and a2.broadcast and a2.channel == a.channel:
                        bb = b or b2
                        if check and (comm_i or comm_j) and not bb:
                            continue
                        if "snd-stale-receiver" in self.mutations and not compatible(r2, q2):
                            continue
                        out.append((a, bb, merge(r2, q2)))


def parallel(T1: TTSB, T2: TTSB) -> Parallel:
    return Parallel(T1, T2)


def parallel_all(parts: t.Sequence[TTSB]) -> TTSB:
    """Left fold of :func:`parallel` over ``parts``."""
    if not parts:
        raise ValueError("nothing to compose")
    acc = parts[0]
    for p in parts[1:]:
        acc = Parallel(acc, p)
    return acc


class Restricted(TTSB):
    """``T \\ C``: channels in ``C`` become internal, and so do the external
    variables named in ``C``."""

    def __init__(self, inner: TTSB, names: t.Iterable[str]) -> None:
        super().__init__()
        self.inner = inner
        self.names = frozenset(names)
        moved = frozenset(v for v in inner.external if v.name in self.names)
        self.external = inner.external - moved
        self.internal = inner.internal | moved
        self.initial = inner.initial
        self.broadcast = inner.broadcast - self.names
        self.alphabet = inner.alphabet - self.names

    def __repr__(self) -> str:
        return f"{self.inner!r} \\ {{{', '.join(sorted(self.names))}}}"

    @property
    def domain(self) -> Domain:
        return self.inner.domain

    def is_state(self, s: Valuation) -> bool:
        return self.inner.is_state(s)

    def _successors(self, s: Valuation) -> t.Iterable[Transition]:
        succ = self.inner.successors(s)
        names = self.names
        committed: t.Optional[bool] = None
        out: t.List[Transition] = []
        for a, b, tgt in succ:
            if a.channel is None or a.channel not in names:
                out.append((a, b, tgt))
                continue
            if a.kind == "recv" or not a.broadcast:
                continue
            if committed is None:
                committed = any(bb for _, bb, _ in succ)
            if committed and not b:
                continue
            out.append((TAU, b, tgt))
        return out


def restrict_ttsb(
    T: TTSB,
    names: t.Iterable[str],
    channels: t.Optional[t.Iterable[str]] = None,
    strict: bool = True,
) -> Restricted:
    """Restrict ``T`` by a set of channel and external-variable names.

    With ``strict`` every name must be a channel (of ``T`` or of
    ``channels``) or a variable of ``T``; otherwise
    :class:`UnknownChannelOrVariable` is raised.
    """
    names = frozenset(names)
    if strict:
        known = set(T.alphabet) | set(T.broadcast) | {v.name for v in T.variables}
        if channels is not None:
            known |= set(channels)
        unknown = sorted(names - known)
        if unknown:
            raise UnknownChannelOrVariable(f"not a channel or variable: {', '.join(unknown)}")
    return Restricted(T, names)


def action_survives(a: Action, names: t.FrozenSet[str]) -> bool:
    """Whether a committed ``a`` is kept by restriction with ``names``."""
    if a.channel is None or a.channel not in names:
        return True
    return a.kind == "send" and a.broadcast
