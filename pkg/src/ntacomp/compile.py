"""Compile guards, invariants and updates into Python closures over value
tuples laid out according to a :class:`~ntacomp.valuations.Domain`."""

from __future__ import annotations

import typing as t

from ntacomp.model.ast import Assign, Guard
from ntacomp.model.expr import RUNTIME_GLOBALS, Expr, to_python
from ntacomp.valuations import Domain


class Layout:
    def __init__(self, domain: Domain, var: str = "s") -> None:
        self.domain = domain
        self.var = var

    def pos(self, name: str) -> int:
        try:
            return self.domain.index[name]
        except KeyError:
            raise KeyError(f"variable {name} is not part of this state space") from None

    def ref(self, name: str) -> str:
        return f"{self.var}[{self.pos(name)}]"

    def expr(self, e: Expr) -> str:
        return to_python(e, self.ref)

    def guard_source(self, g: Guard) -> str:
        parts = []
        for a in g.atoms:
            left = self.ref(a.clock)
            if a.other is not None:
                left = f"({left} - {self.ref(a.other)})"
            op = "==" if a.op == "==" else a.op
            parts.append(f"{left} {op} {a.bound}")
        data = self.expr(g.data)
        if data != "True":
            parts.append(data)
        return " and ".join(f"({p})" for p in parts) if parts else "True"


def _compile(src: str, name: str) -> t.Callable:
    env = dict(RUNTIME_GLOBALS)
    exec(compile(src, f"<generated {name}>", "exec"), env)
    return env[name]


def guard_fn(g: Guard, layout: Layout) -> t.Callable[[tuple], bool]:
    if g.trivial:
        return _true
    src = f"def _g({layout.var}):\n    return bool({layout.guard_source(g)})\n"
    return _compile(src, "_g")


def _true(_s: tuple) -> bool:
    return True


def update_fn(
    updates: t.Sequence[Assign],
    layout: Layout,
    extra: t.Sequence[t.Tuple[str, t.Any]] = (),
) -> t.Callable[[tuple], tuple]:
    """Sequential assignments followed by constant writes ``extra`` (used
    for location variables).  Returns ``None`` when an integer variable
    would leave its declared range: such an edge has no target valuation and
    is treated as disabled."""
    v = layout.var
    lines = [f"def _u({v}):", f"    {v} = list({v})"]
    for a in updates:
        i = layout.pos(a.target)
        var = layout.domain.vars[i]
        rhs = layout.expr(a.value)
        if var.kind == "clock":
            lines.append(f"    {v}[{i}] = {min(int(a.value.value), var.hi)}")  # type: ignore[attr-defined]
            continue
        if var.kind == "bool":
            rhs = f"bool({rhs})"
        lines.append(f"    {v}[{i}] = {rhs}")
        if var.kind == "int":
            lines.append(f"    if not ({var.lo} <= {v}[{i}] <= {var.hi}):")
            lines.append("        return None")
    for name, value in extra:
        lines.append(f"    {v}[{layout.pos(name)}] = {value!r}")
    lines.append(f"    return tuple({v})")
    return _compile("\n".join(lines) + "\n", "_u")


def tick_fn(domain: Domain) -> t.Callable[[tuple], tuple]:
    """Advance every clock of ``domain`` by one, saturating."""
    if not domain.clocks:
        return lambda s: s
    lines = ["def _tick(s):", "    s = list(s)"]
    for i, ceiling in domain.clocks:
        lines.append(f"    if s[{i}] < {ceiling}: s[{i}] += 1")
    lines.append("    return tuple(s)")
    return _compile("\n".join(lines) + "\n", "_tick")
