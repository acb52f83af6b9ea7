"""Random TTSBs and random networks for property and differential tests."""

from __future__ import annotations

import dataclasses
import random
import typing as t

from ntacomp.model.ast import Network
from ntacomp.model.parser import parse_model
from ntacomp.model.validate import validate_axioms
from ntacomp.ttsb import DELAY, TAU, Action, ExplicitTTSB, Transition, recv, send
from ntacomp.valuations import Valuation, Var, all_valuations, bool_var, clock, int_var, loc_var, merge, time_shift

# -- random TTSBs ---------------------------------------------------------------


def shared_pool(n: int = 2, size: int = 2) -> t.Tuple[Var, ...]:
    """External variables ``e0, e1, ...`` with ``size`` values each."""
    return tuple(bool_var(f"e{i}") if size == 2 else int_var(f"e{i}", 0, size - 1) for i in range(n))


def random_ttsb(
    rng: random.Random,
    name: str,
    external: t.Sequence[Var] = (),
    binary: t.Sequence[str] = (),
    broadcast: t.Sequence[str] = (),
    locations: int = 2,
    ceiling: int = 0,
    p_commit: float = 0.3,
    density: float = 0.5,
) -> ExplicitTTSB:
    """A TTSB over ``external`` plus an internal location variable (and an
    internal clock when ``ceiling > 0``), satisfying Axioms I-VI by
    construction.

    Every valuation is a state.  Input transitions depend only on the
    internal part, so they survive external updates, and broadcast inputs
    keep the external part."""
    locs = tuple(f"q{i}" for i in range(locations))
    p = loc_var(f"{name}.p", locs, owner=name)
    internal: t.List[Var] = [p]
    if ceiling > 0:
        internal.append(clock(f"{name}.x", ceiling))
    ext = list(external)
    ext_vals = list(all_valuations(ext)) if ext else [Valuation()]
    int_vals = list(all_valuations(internal))
    channels = [(c, False) for c in binary] + [(c, True) for c in broadcast]

    def pick_ext() -> t.Optional[Valuation]:
        return rng.choice(ext_vals) if ext and rng.random() < 0.5 else None

    table: t.Dict[Valuation, t.List[Transition]] = {}
    for h in int_vals:
        committed = rng.random() < p_commit
        # (action, committed bit, guard over external values or None, target
        # internal part, target external part or None to keep)
        moves: t.List[t.Tuple[Action, bool, t.Optional[t.FrozenSet[Valuation]], Valuation, t.Optional[Valuation]]] = []
        for _ in range(rng.randint(0, 2)):
            if rng.random() < density:
                guard = frozenset(rng.sample(ext_vals, rng.randint(1, len(ext_vals)))) if ext and rng.random() < 0.4 else None
                moves.append((TAU, committed, guard, rng.choice(int_vals), pick_ext()))
        for ch, bc in channels:
            if rng.random() < density * 0.6:
                b = committed and rng.random() < 0.5
                guard = frozenset(rng.sample(ext_vals, rng.randint(1, len(ext_vals)))) if ext and rng.random() < 0.3 else None
                moves.append((send(ch, bc), b, guard, rng.choice(int_vals), pick_ext()))
            n_in = rng.randint(0, 2) if rng.random() < density else 0
            for _ in range(n_in):
                b = committed and rng.random() < 0.5
                moves.append((recv(ch, bc), b, None, rng.choice(int_vals), None if bc else pick_ext()))
        if committed and not any(b and (a.kind == "tau" or a.kind == "send") and g is None for a, b, g, _, _ in moves):
            moves.append((TAU, True, None, rng.choice(int_vals), pick_ext()))
        heard = {a.channel for a, *_ in moves if a.kind == "recv" and a.broadcast}
        has_delay = not committed and rng.random() < 0.7
        for e in ext_vals:
            s = merge(e, h) if ext else h
            out: t.List[Transition] = []
            for a, b, guard, h2, e2 in moves:
                if guard is not None and e not in guard:
                    continue
                tgt_e = e if e2 is None else e2
                out.append((a, b, merge(tgt_e, h2) if ext else h2))
            for ch in broadcast:
                if ch not in heard:
                    out.append((recv(ch, True), False, s))
            if has_delay:
                out.append((DELAY, False, time_shift(s, 1)))
            table[s] = list(dict.fromkeys(out))
    initial = merge(ext_vals[0], int_vals[0]) if ext else int_vals[0]
    return ExplicitTTSB(ext, internal, initial, table, list(table), broadcast=broadcast, alphabet=[c for c, _ in channels])


def delete_transitions(rng: random.Random, T: ExplicitTTSB, p: float = 0.3) -> ExplicitTTSB:
    """A copy of ``T`` with some non-input transitions removed such that
    no state changes committedness; the identity relates it to ``T``."""
    table: t.Dict[Valuation, t.List[Transition]] = {}
    for s, ts in T.table.items():
        keep = list(ts)
        committed = any(b for _, b, _ in ts)
        for tr in ts:
            a, b, _ = tr
            if a.kind == "recv" or rng.random() >= p:
                continue
            rest = [x for x in keep if x != tr]
            if committed and not any(bb for _, bb, _ in rest):
                continue
            keep = rest
        table[s] = keep
    return ExplicitTTSB(T.external, T.internal, T.initial, table, T.states, broadcast=T.broadcast, alphabet=T.alphabet)


# -- Example 2: three TTSBs whose composition needs SND without a priority
# condition to stay associative -------------------------------------------------


def example2() -> t.Tuple[ExplicitTTSB, ExplicitTTSB, ExplicitTTSB]:
    """``T1`` (committed ``r``, uncommitted input), ``T2`` (uncommitted
    broadcast send) and ``T3`` (committed ``t`` with a committed input)."""
    d = "d"
    out = []
    specs = {
        "T1": [("r", [(recv(d, True), False, "r"), (TAU, True, "r1")]), ("r1", [(recv(d, True), False, "r1")])],
        "T2": [("s", [(send(d, True), False, "s1"), (recv(d, True), False, "s")]), ("s1", [(recv(d, True), False, "s1")])],
        "T3": [("t", [(recv(d, True), True, "t1")]), ("t1", [(recv(d, True), False, "t1")])],
    }
    for name, rows in specs.items():
        v = loc_var(f"{name}.loc", tuple(loc for loc, _ in rows), owner=name)
        st = {loc: Valuation({v: loc}) for loc, _ in rows}
        table = {st[loc]: [(a, b, st[tgt]) for a, b, tgt in moves] for loc, moves in rows}
        out.append(ExplicitTTSB((), (v,), st[rows[0][0]], table, broadcast=(d,)))
    return out[0], out[1], out[2]


# -- random networks -------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class NetworkConfig:
    seed: int = 1
    max_automata: int = 3
    max_locations: int = 3
    max_channels: int = 2
    max_shared_vars: int = 2
    clock_ceiling: int = 3


def random_network_text(cfg: NetworkConfig) -> str:
    """DSL source of a random network that satisfies the well-formedness
    axioms by construction."""
    rng = random.Random(cfg.seed)
    lines = [f"// generated: {cfg}"]
    n_ch = rng.randint(1, cfg.max_channels)
    chans = [(f"c{i}", rng.random() < 0.5) for i in range(n_ch)]
    for name, bc in chans:
        lines.append(f"{'broadcast' if bc else 'binary'} chan {name};")
    shared = []
    for i in range(rng.randint(0, cfg.max_shared_vars)):
        if rng.random() < 0.5:
            shared.append((f"g{i}", "int", 2))
            lines.append(f"var int[0, 2] g{i} = 0;")
        else:
            shared.append((f"g{i}", "bool", 1))
            lines.append(f"var bool g{i} = false;")
    top = max(1, cfg.clock_ceiling - 1)
    names = []
    for k in range(rng.randint(1, cfg.max_automata)):
        name = f"A{k}"
        names.append(name)
        n_loc = rng.randint(1, cfg.max_locations)
        locs = [f"l{i}" for i in range(n_loc)]
        has_clock = cfg.clock_ceiling > 0 and rng.random() < 0.8
        has_local = rng.random() < 0.5
        committed = [loc for loc in locs[1:] if rng.random() < 0.4]
        body = []
        if has_clock:
            body.append("local clock x;")
        if has_local:
            body.append("local int[0, 2] k = 0;")
        body.append("init l0;")
        body.append(f"location {', '.join(locs)};")
        if committed:
            body.append(f"committed {', '.join(committed)};")
        invs = {}
        if has_clock:
            for loc in locs:
                if rng.random() < 0.4:
                    invs[loc] = rng.randint(1, top)
                    body.append(f"inv {loc} {{ x <= {invs[loc]} }}")

        def upd(allow_shared: bool) -> t.List[str]:
            out = []
            if has_clock and rng.random() < 0.4:
                out.append("x := 0")
            if has_local and rng.random() < 0.4:
                out.append("k := (k + 1) % 3")
            if allow_shared and shared and rng.random() < 0.5:
                g, kind, _ = rng.choice(shared)
                out.append(f"{g} := ({g} + 1) % 3" if kind == "int" else f"{g} := !{g}")
            return out

        def guard(allow_shared: bool, allow_clock: bool) -> t.List[str]:
            out = []
            if has_clock and allow_clock and rng.random() < 0.5:
                out.append(f"x {rng.choice(['>=', '<='])} {rng.randint(0, top)}")
            if has_local and rng.random() < 0.3:
                out.append(f"k == {rng.randint(0, 2)}")
            if allow_shared and shared and rng.random() < 0.3:
                g, kind, _ = rng.choice(shared)
                out.append(f"{g} == {rng.randint(0, 2)}" if kind == "int" else (g if rng.random() < 0.5 else f"!{g}"))
            return out

        # a cycle through all locations keeps most of them reachable
        ring = [(locs[i], locs[(i + 1) % n_loc]) for i in range(n_loc)]
        extra = [(rng.choice(locs), rng.choice(locs)) for _ in range(rng.randint(0, n_loc + 1))]
        for src, dst in ring + extra:
            r = rng.random()
            parts = []
            if r < 0.35 or not chans:
                urgent = rng.random() < 0.15
                g = guard(True, not urgent)
                u = upd(True)
                sync = None
            else:
                ch, bc = rng.choice(chans)
                urgent = False
                if rng.random() < 0.5:
                    sync = f"{ch}!"
                    g, u = guard(True, True), upd(True)
                else:
                    sync = f"{ch}?"
                    g, u = guard(False, True), upd(not bc)
            if g:
                parts.append(f"guard {' && '.join(g)};")
            if sync:
                parts.append(f"sync {sync};")
            if u:
                parts.append(f"do {', '.join(u)};")
            if urgent:
                parts.append("urgent;")
            body.append(f"trans {src} -> {dst} {{ {' '.join(parts)} }}")
        for loc in committed:
            # always-enabled way out of a committed location
            reset = "do x := 0; " if has_clock else ""
            body.append(f"trans {loc} -> l0 {{ {reset}}}")
        lines.append(f"automaton {name} {{")
        lines.extend("  " + b for b in body)
        lines.append("}")
    lines.append(f"system {', '.join(names)};")
    return "\n".join(lines) + "\n"


def random_network(cfg: NetworkConfig) -> Network:
    text = random_network_text(cfg)
    net = parse_model(text, source=f"<random seed={cfg.seed}>")
    bad = validate_axioms(net)
    if bad:
        raise AssertionError("generator produced an invalid network:\n" + "\n".join(map(str, bad)) + "\n" + text)
    return net


def random_networks(seeds: t.Iterable[int], **bounds: int) -> t.Iterator[Network]:
    for s in seeds:
        yield random_network(NetworkConfig(seed=s, **bounds))


__all__ = [
    "NetworkConfig",
    "delete_transitions",
    "example2",
    "random_network",
    "random_network_text",
    "random_networks",
    "random_ttsb",
    "shared_pool",
]
