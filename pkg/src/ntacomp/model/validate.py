"""Static well-formedness checks for networks over and above parsing."""

from __future__ import annotations

import dataclasses
import itertools
import typing as t

from ntacomp.compile import Layout, guard_fn, update_fn
from ntacomp.model.ast import Edge, Guard, Network, TimedAutomaton
from ntacomp.valuations import Domain

IX_LIMIT = 2_000_000

AXIOMS = (
    "Compatibility",
    "InitialInvariant",
    "LeftClosed",
    "AxiomVII",
    "AxiomVIII",
    "AxiomIX",
    "AxiomX",
    "AxiomXI",
)


@dataclasses.dataclass(frozen=True)
class Violation:
    axiom: str
    automaton: str
    where: str
    detail: str

    def __str__(self) -> str:
        return f"{self.axiom}: {self.automaton} {self.where}: {self.detail}"

    def to_json(self) -> t.Dict[str, str]:
        return dataclasses.asdict(self)


def _edge_text(e: Edge) -> str:
    return f"{e.source} -> {e.target} [{e.label}]"


def _short(A: TimedAutomaton, names: t.Iterable[str]) -> str:
    return ", ".join(sorted(A.local_name(n) for n in names))


def validate_axioms(net: Network) -> t.List[Violation]:
    """All violations, ordered by automaton name and then by check."""
    out: t.List[Violation] = []
    out.extend(_compatibility(net))
    for A in sorted(net.automata, key=lambda a: a.name):
        out.extend(check_automaton(A))
    return out


def _compatibility(net: Network) -> t.List[Violation]:
    out = []
    autos = sorted(net.automata, key=lambda a: a.name)
    for A, B in itertools.permutations(autos, 2):
        clash = {v.name for v in A.internal} & {v.name for v in B.variables}
        if clash:
            out.append(Violation("Compatibility", A.name, "", f"internal variables also used by {B.name}: {', '.join(sorted(clash))}"))
    for A, B in itertools.combinations(autos, 2):
        ia, ib = A.initial_values(), B.initial_values()
        for name in sorted(set(ia) & set(ib)):
            if ia[name] != ib[name]:
                out.append(Violation("Compatibility", A.name, "", f"initial value of {name} disagrees with {B.name}"))
    return out


def check_automaton(A: TimedAutomaton) -> t.List[Violation]:
    out: t.List[Violation] = []
    ext = {v.name for v in A.external}
    dom = Domain(A.variables)
    layout = Layout(dom)
    init = A.initial_values()
    inv0 = guard_fn(A.invariant(A.initial_location), layout)
    if not inv0(tuple(init[n] for n in dom.names)):
        out.append(Violation("InitialInvariant", A.name, A.initial_location, "initial valuation violates the invariant"))
    for loc, g in A.invariants:
        bad = [a for a in g.atoms if a.other is None and a.op not in ("<", "<=")]
        for a in bad:
            out.append(Violation("LeftClosed", A.name, loc, f"clock lower bound {A.local_name(a.clock)} {a.op} {a.bound} in invariant"))
        read = g.refs() & ext
        if read:
            out.append(Violation("AxiomVII", A.name, loc, f"invariant reads external {_short(A, read)}"))
    for e in A.edges:
        if e.label.kind == "recv":
            read = e.guard.refs() & ext
            if read:
                out.append(Violation("AxiomVIII", A.name, _edge_text(e), f"input guard reads external {_short(A, read)}"))
        if e.urgent and (e.label.kind != "tau" or e.guard.atoms):
            why = "not a tau transition" if e.label.kind != "tau" else "guard constrains clocks"
            out.append(Violation("AxiomX", A.name, _edge_text(e), f"urgent transition {why}"))
        if e.label.kind == "recv" and e.label.broadcast:
            wrote = e.written() & ext
            if wrote:
                out.append(Violation("AxiomXI", A.name, _edge_text(e), f"broadcast input updates external {_short(A, wrote)}"))
    for loc in sorted(A.committed):
        v = _axiom_ix(A, loc)
        if v is not None:
            out.append(v)
    return out


def _axiom_ix(A: TimedAutomaton, loc: str) -> t.Optional[Violation]:
    """Every valuation satisfying the invariant of committed ``loc`` must
    enable some outgoing transition whose target satisfies its invariant."""
    edges = A.edges_from(loc)
    inv = A.invariant(loc)
    names: t.Set[str] = set(inv.refs())
    for e in edges:
        names |= e.guard.refs() | e.read() | e.written() | A.invariant(e.target).refs()
    by_name = {v.name: v for v in A.variables}
    dom = Domain(by_name[n] for n in names)
    size = 1
    for v in dom.vars:
        size *= len(v.values())
    if size > IX_LIMIT:
        return Violation("AxiomIX", A.name, loc, f"too many valuations to enumerate ({size})")
    layout = Layout(dom)
    inv_fn = guard_fn(inv, layout)
    compiled = [
        (guard_fn(e.guard, layout), update_fn(e.updates, layout), guard_fn(A.invariant(e.target), layout))
        for e in edges
    ]
    for values in itertools.product(*(v.values() for v in dom.vars)):
        if not inv_fn(values):
            continue
        ok = False
        for g, u, ti in compiled:
            if not g(values):
                continue
            try:
                nv = u(values)
            except Exception:  # a runtime error leaves the edge disabled here too
                continue
            if nv is not None and ti(nv):
                ok = True
                break
        if not ok:
            shown = ", ".join(f"{A.local_name(n)}={v.show(x)}" for n, v, x in zip(dom.names, dom.vars, values))
            return Violation("AxiomIX", A.name, loc, f"no transition can leave the committed location at {shown or 'any valuation'}")
    return None


def is_left_closed(g: Guard) -> bool:
    return all(a.other is not None or a.op in ("<", "<=") for a in g.atoms)
