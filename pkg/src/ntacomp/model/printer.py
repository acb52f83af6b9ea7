"""Print an elaborated network back as model source.

Each automaton instance becomes a parameterless automaton of the same name,
with select families already expanded, so ``parse_model(print_network(n))``
rebuilds ``n``."""

from __future__ import annotations

import re
import typing as t

from ntacomp.model.ast import Edge, Guard, Network, TimedAutomaton
from ntacomp.model.expr import TRUE, show
from ntacomp.valuations import Var

_INDEXED = re.compile(r"^(.*)\[(\d+)\]$")


def _groups(names: t.Sequence[str]) -> t.List[t.Tuple[str, t.List[int]]]:
    """Runs of ``b[0], b[1], ...`` collapse into ``(b, [0, 1, ...])``;
    other names stand alone with an empty index list."""
    out: t.List[t.Tuple[str, t.List[int]]] = []
    for n in names:
        m = _INDEXED.match(n)
        if m and out and out[-1][0] == m.group(1) and out[-1][1] and out[-1][1][-1] + 1 == int(m.group(2)):
            out[-1][1].append(int(m.group(2)))
        elif m and int(m.group(2)) == 0:
            out.append((m.group(1), [0]))
        else:
            out.append((n, []))
    return out


def _type(v: Var) -> str:
    if v.kind == "bool":
        return "bool"
    if v.kind == "clock":
        return "clock"
    return f"int[{v.lo}, {v.hi}]"


def _value(x: t.Any) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    return str(x)


def _var_decls(vs: t.Sequence[Var], init: t.Mapping[str, t.Any], local: t.Callable[[str], str]) -> t.List[str]:
    by_name = {v.name: v for v in vs}
    out = []
    for base, idx in _groups([v.name for v in vs]):
        if not idx:
            v = by_name[base]
            tail = "" if v.kind == "clock" else f" = {_value(init[v.name])}"
            out.append(f"{_type(v)} {local(base)}{tail};")
            continue
        members = [by_name[f"{base}[{k}]"] for k in idx]
        if len({_type(v) for v in members}) > 1:
            for v in members:
                out.append(f"{_type(v)} {local(v.name)} = {_value(init[v.name])};")
            continue
        v = members[0]
        if v.kind == "clock":
            out.append(f"clock {local(base)}[{len(idx)}];")
        else:
            vals = ", ".join(_value(init[m.name]) for m in members)
            out.append(f"{_type(v)} {local(base)}[{len(idx)}] = {{{vals}}};")
    return out


def _guard(g: Guard, name: t.Callable[[str], str]) -> str:
    parts = []
    for a in g.atoms:
        lhs = name(a.clock) if a.other is None else f"{name(a.clock)} - {name(a.other)}"
        parts.append(f"{lhs} {a.op} {a.bound}")
    if g.data != TRUE or not parts:
        parts.append(show(g.data, name, 4 if parts else 0))
    return " && ".join(parts)


def _edge(e: Edge, name: t.Callable[[str], str]) -> str:
    parts = []
    if not e.guard.trivial:
        parts.append(f"guard {_guard(e.guard, name)};")
    if e.label.kind != "tau":
        parts.append(f"sync {e.label};")
    if e.updates:
        parts.append("do " + ", ".join(f"{name(u.target)} := {show(u.value, name)}" for u in e.updates) + ";")
    if e.urgent:
        parts.append("urgent;")
    body = " ".join(parts)
    return f"trans {e.source} -> {e.target} {{ {body} }}" if body else f"trans {e.source} -> {e.target} {{ }}"


def print_automaton(A: TimedAutomaton) -> str:
    name = A.local_name
    init = A.initial_values()
    lines = [f"automaton {A.name} {{"]
    for d in _var_decls(A.internal, init, name):
        lines.append(f"  local {d}")
    lines.append(f"  location {', '.join(A.locations)};")
    lines.append(f"  init {A.initial_location};")
    committed = [loc for loc in A.locations if loc in A.committed]
    if committed:
        lines.append(f"  committed {', '.join(committed)};")
    for loc, g in A.invariants:
        lines.append(f"  inv {loc} {{ {'' if g.trivial else _guard(g, name)} }}")
    for e in A.edges:
        lines.append("  " + _edge(e, name))
    lines.append("}")
    return "\n".join(lines)


def print_network(net: Network) -> str:
    lines = []
    for cname, value in net.constants:
        kind = "bool" if isinstance(value, bool) else "int"
        lines.append(f"const {kind} {cname} = {_value(value)};")
    bc = dict(net.channels)
    for base, idx in _groups([c for c, _ in net.channels]):
        first = f"{base}[0]" if idx else base
        kind = "broadcast" if bc[first] else "binary"
        lines.append(f"{kind} chan {base}[{len(idx)}];" if idx else f"{kind} chan {base};")
    init = dict(net.global_initial)
    for d in _var_decls(net.globals, init, lambda n: n):
        lines.append(f"var {d}")
    if lines:
        lines.append("")
    for A in net.automata:
        lines.append(print_automaton(A))
        lines.append("")
    lines.append(f"system {', '.join(net.names)};")
    for p in net.properties:
        lines.append(f'property {p.name} "{show(p.expr)}";')
    return "\n".join(lines) + "\n"
