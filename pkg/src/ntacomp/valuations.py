"""Typed variables and immutable valuations.

A valuation is a finite map from variables to values.  Valuations are
immutable and hashable; their entries are kept in a canonical order (by
variable name) so that equal maps compare and hash equal regardless of how
they were built.

Clocks range over the integers ``0 .. ceiling``, where the value ``ceiling``
stands for "above every constant" (printed as ``⊤``).  Advancing time
saturates at the ceiling.
"""

from __future__ import annotations

import itertools
import typing as t

__all__ = [
    "Var",
    "Domain",
    "Valuation",
    "IncompatibleValuations",
    "TOP_SYMBOL",
    "clock",
    "int_var",
    "bool_var",
    "loc_var",
    "override",
    "underride",
    "update",
    "merge",
    "compatible",
    "restrict",
    "time_shift",
    "all_valuations",
]

TOP_SYMBOL = "⊤"

CLOCK = "clock"
INT = "int"
BOOL = "bool"
LOC = "loc"


class IncompatibleValuations(ValueError):
    """Raised when merging valuations that disagree on a shared variable."""

    def __init__(self, var: str, left: t.Any, right: t.Any) -> None:
        super().__init__(f"valuations disagree on {var}: {left!r} vs {right!r}")
        self.var = var
        self.left = left
        self.right = right


class Var:
    """A typed variable.

    ``kind`` is one of ``clock``, ``int``, ``bool`` or ``loc``.  Integers carry
    inclusive bounds ``lo``/``hi``; clocks carry their ceiling in ``hi`` (with
    ``lo == 0``); location variables carry the tuple of location names and the
    owning automaton.
    """

    __slots__ = ("name", "kind", "lo", "hi", "locations", "owner", "_key", "_hash")

    def __init__(
        self,
        name: str,
        kind: str,
        lo: int = 0,
        hi: int = 0,
        locations: t.Sequence[str] = (),
        owner: t.Optional[str] = None,
    ) -> None:
        if kind not in (CLOCK, INT, BOOL, LOC):
            raise ValueError(f"unknown variable kind {kind!r}")
        if kind == INT and lo > hi:
            raise ValueError(f"empty integer range [{lo}, {hi}] for {name}")
        if kind == CLOCK and hi < 1:
            raise ValueError(f"clock {name} needs a positive ceiling")
        if kind == BOOL:
            lo, hi = 0, 1
        if kind == LOC:
            if not locations:
                raise ValueError(f"location variable {name} needs locations")
            lo, hi = 0, len(locations) - 1
        if kind == CLOCK:
            lo = 0
        self.name = name
        self.kind = kind
        self.lo = lo
        self.hi = hi
        self.locations = tuple(locations)
        self.owner = owner
        self._key = (name, kind, lo, hi, self.locations)
        self._hash = hash(self._key)

    @property
    def is_clock(self) -> bool:
        return self.kind == CLOCK

    @property
    def ceiling(self) -> int:
        if self.kind != CLOCK:
            raise AttributeError(f"{self.name} is not a clock")
        return self.hi

    def values(self) -> tuple:
        """All values of the (finite) domain, in a canonical order."""
        if self.kind == BOOL:
            return (False, True)
        if self.kind == LOC:
            return self.locations
        return tuple(range(self.lo, self.hi + 1))

    def contains(self, value: t.Any) -> bool:
        if self.kind == BOOL:
            return isinstance(value, bool)
        if self.kind == LOC:
            return value in self.locations
        return isinstance(value, int) and not isinstance(value, bool) and self.lo <= value <= self.hi

    def show(self, value: t.Any) -> str:
        if self.kind == CLOCK and value == self.hi:
            return TOP_SYMBOL
        if self.kind == BOOL:
            return "true" if value else "false"
        return str(value)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Var) and (self is other or self._key == other._key)

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "Var") -> bool:
        return self._key < other._key

    def __repr__(self) -> str:
        if self.kind == INT:
            return f"Var({self.name}: int[{self.lo},{self.hi}])"
        if self.kind == CLOCK:
            return f"Var({self.name}: clock<={self.hi})"
        return f"Var({self.name}: {self.kind})"


def clock(name: str, ceiling: int) -> Var:
    return Var(name, CLOCK, 0, ceiling)


def int_var(name: str, lo: int, hi: int) -> Var:
    return Var(name, INT, lo, hi)


def bool_var(name: str) -> Var:
    return Var(name, BOOL)


def loc_var(name: str, locations: t.Sequence[str], owner: t.Optional[str] = None) -> Var:
    return Var(name, LOC, locations=locations, owner=owner)


class Domain:
    """An interned, name-sorted tuple of variables."""

    __slots__ = ("vars", "names", "index", "clocks", "_hash", "__weakref__")

    _interned: t.Dict[tuple, "Domain"] = {}

    def __new__(cls, variables: t.Iterable[Var]) -> "Domain":
        vs = tuple(sorted(set(variables), key=lambda v: v.name))
        existing = cls._interned.get(vs)
        if existing is not None:
            return existing
        for a, b in zip(vs, vs[1:]):
            if a.name == b.name:
                raise ValueError(f"conflicting declarations of variable {a.name}")
        self = super().__new__(cls)
        self.vars = vs
        self.names = tuple(v.name for v in vs)
        self.index = {v.name: i for i, v in enumerate(vs)}
        self.clocks = tuple((i, v.hi) for i, v in enumerate(vs) if v.kind == CLOCK)
        self._hash = hash(vs)
        cls._interned[vs] = self
        return self

    def __len__(self) -> int:
        return len(self.vars)

    def __iter__(self) -> t.Iterator[Var]:
        return iter(self.vars)

    def __contains__(self, item: object) -> bool:
        if isinstance(item, Var):
            i = self.index.get(item.name)
            return i is not None and self.vars[i] == item
        return item in self.index

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        return self is other

    def __repr__(self) -> str:
        return "Domain(" + ", ".join(self.names) + ")"

    def var(self, name: str) -> Var:
        return self.vars[self.index[name]]


EMPTY_DOMAIN = Domain(())


class Valuation(t.Mapping[str, t.Any]):
    """An immutable map from variables to values.

    Lookups are by variable name (``v["x"]``) or by :class:`Var`.  Build one
    from a ``{Var: value}`` mapping, or use :meth:`of` for the internal
    (domain, values) form.
    """

    __slots__ = ("domain", "values", "_hash")

    def __init__(self, entries: t.Union[t.Mapping[Var, t.Any], t.Iterable[t.Tuple[Var, t.Any]]] = ()) -> None:
        items = dict(entries.items() if isinstance(entries, t.Mapping) else entries)
        dom = Domain(items)
        vals = []
        for var in dom.vars:
            value = items[var]
            if var.kind == CLOCK and isinstance(value, int) and not isinstance(value, bool) and value > var.hi:
                value = var.hi
            if not var.contains(value):
                raise ValueError(f"value {value!r} outside the domain of {var!r}")
            vals.append(value)
        self.domain = dom
        self.values = tuple(vals)
        self._hash = hash((dom, self.values))

    @classmethod
    def of(cls, domain: Domain, values: tuple) -> "Valuation":
        self = object.__new__(cls)
        self.domain = domain
        self.values = values
        self._hash = hash((domain, values))
        return self

    # mapping protocol --------------------------------------------------
    def __getitem__(self, key: t.Union[str, Var]) -> t.Any:
        name = key.name if isinstance(key, Var) else key
        return self.values[self.domain.index[name]]

    def __iter__(self) -> t.Iterator[str]:
        return iter(self.domain.names)

    def __len__(self) -> int:
        return len(self.values)

    def __contains__(self, key: object) -> bool:
        return key in self.domain

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if isinstance(other, Valuation):
            return self._hash == other._hash and self.domain is other.domain and self.values == other.values
        return NotImplemented

    def __lt__(self, other: "Valuation") -> bool:
        return self.sort_key() < other.sort_key()

    def sort_key(self) -> tuple:
        return (self.domain.names, tuple(_orderable(v) for v in self.values))

    @property
    def vars(self) -> t.Tuple[Var, ...]:
        return self.domain.vars

    def replace(self, **changes: t.Any) -> "Valuation":
        """Return a copy with the given (existing) variables set."""
        vals = list(self.values)
        for name, value in changes.items():
            i = self.domain.index[name]
            var = self.domain.vars[i]
            if var.kind == CLOCK and value > var.hi:
                value = var.hi
            if not var.contains(value):
                raise ValueError(f"value {value!r} outside the domain of {var!r}")
            vals[i] = value
        return Valuation.of(self.domain, tuple(vals))

    def show(self) -> str:
        inner = ", ".join(f"{v.name}↦{v.show(x)}" for v, x in zip(self.domain.vars, self.values))
        return "{" + inner + "}"

    __str__ = show

    def __repr__(self) -> str:
        return f"Valuation({self.show()})"


def _orderable(value: t.Any) -> tuple:
    # bools, ints and location names mixed in one key must still sort
    if isinstance(value, str):
        return (1, 0, value)
    return (0, int(value), "")


EMPTY = Valuation.of(EMPTY_DOMAIN, ())


# ---------------------------------------------------------------------------
# Operations.  Each binary operation depends only on the two domains, so the
# index plan is computed once per domain pair and cached.

_override_plans: t.Dict[t.Tuple[Domain, Domain], t.Tuple[Domain, tuple]] = {}
_update_plans: t.Dict[t.Tuple[Domain, Domain], tuple] = {}
_shared_plans: t.Dict[t.Tuple[Domain, Domain], tuple] = {}
_restrict_plans: t.Dict[t.Tuple[Domain, frozenset], t.Tuple[Domain, tuple]] = {}


def _override_plan(df: Domain, dg: Domain) -> t.Tuple[Domain, tuple]:
    plan = _override_plans.get((df, dg))
    if plan is None:
        clash = [v for v in df.vars if v.name in dg.index and dg.var(v.name) != v]
        if clash:
            raise ValueError(f"variable {clash[0].name} declared with different types")
        dom = Domain(df.vars + dg.vars)
        # (0, i) means "take f.values[i]", (1, i) means "take g.values[i]"
        picks = tuple(
            (0, df.index[n]) if n in df.index else (1, dg.index[n]) for n in dom.names
        )
        plan = (dom, picks)
        _override_plans[(df, dg)] = plan
    return plan


def override(f: Valuation, g: Valuation) -> Valuation:
    """``f ▷ g``: the union of both maps where ``f`` wins on shared variables."""
    if f.domain is g.domain:
        return f
    dom, picks = _override_plan(f.domain, g.domain)
    src = (f.values, g.values)
    return Valuation.of(dom, tuple(src[w][i] for w, i in picks))


def underride(f: Valuation, g: Valuation) -> Valuation:
    """``f ◁ g``, i.e. ``g ▷ f``."""
    return override(g, f)


def update(f: Valuation, g: Valuation) -> Valuation:
    """``f[g]``: ``f`` with the shared variables taken from ``g``."""
    df, dg = f.domain, g.domain
    if df is dg:
        return g
    plan = _update_plans.get((df, dg))
    if plan is None:
        plan = tuple((i, dg.index[n]) for i, n in enumerate(df.names) if n in dg.index)
        _update_plans[(df, dg)] = plan
    if not plan:
        return f
    vals = list(f.values)
    gv = g.values
    for i, j in plan:
        vals[i] = gv[j]
    return Valuation.of(df, tuple(vals))


def _shared(df: Domain, dg: Domain) -> tuple:
    plan = _shared_plans.get((df, dg))
    if plan is None:
        plan = tuple((i, dg.index[n]) for i, n in enumerate(df.names) if n in dg.index)
        _shared_plans[(df, dg)] = plan
    return plan


def compatible(f: Valuation, g: Valuation) -> bool:
    """``f ♥ g``: the two maps agree on every shared variable."""
    fv, gv = f.values, g.values
    for i, j in _shared(f.domain, g.domain):
        if fv[i] != gv[j]:
            return False
    return True


def merge(f: Valuation, g: Valuation) -> Valuation:
    """``f ‖ g``: union of two compatible maps."""
    fv, gv = f.values, g.values
    for i, j in _shared(f.domain, g.domain):
        if fv[i] != gv[j]:
            raise IncompatibleValuations(f.domain.names[i], fv[i], gv[j])
    return override(f, g)


def restrict(f: Valuation, names: t.Iterable[t.Union[str, Var]]) -> Valuation:
    """``f⌈X``: keep only the variables named in ``names``."""
    if isinstance(names, Domain):
        key = frozenset(names.names)
    elif isinstance(names, frozenset) and all(isinstance(n, str) for n in names):
        key = names
    else:
        key = frozenset(n.name if isinstance(n, Var) else n for n in names)
    df = f.domain
    plan = _restrict_plans.get((df, key))
    if plan is None:
        keep = tuple(i for i, n in enumerate(df.names) if n in key)
        plan = (Domain(df.vars[i] for i in keep), keep)
        _restrict_plans[(df, key)] = plan
    dom, keep = plan
    if dom is df:
        return f
    fv = f.values
    return Valuation.of(dom, tuple(fv[i] for i in keep))


def time_shift(v: Valuation, d: int) -> Valuation:
    """``v ⊕ d``: advance every clock by ``d`` ticks, saturating at its ceiling."""
    if d < 0:
        raise ValueError("time cannot go backwards")
    clocks = v.domain.clocks
    if d == 0 or not clocks:
        return v
    vals = list(v.values)
    for i, ceiling in clocks:
        x = vals[i] + d
        vals[i] = ceiling if x > ceiling else x
    return Valuation.of(v.domain, tuple(vals))


def all_valuations(variables: t.Iterable[Var]) -> t.Iterator[Valuation]:
    """Enumerate ``Val(X)`` for a finite set of variables, in canonical order."""
    dom = Domain(variables)
    for combo in itertools.product(*(var.values() for var in dom.vars)):
        yield Valuation.of(dom, combo)
