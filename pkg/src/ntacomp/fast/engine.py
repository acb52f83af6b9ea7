"""Compiled (numba) state-space exploration over bit-packed states.

The generated code follows the same rules as :class:`ntacomp.nta.NetworkEngine`
for the monolithic semantics and as :mod:`ntacomp.compose` for the
compositional one; differential tests keep the two implementations aligned.
"""

from __future__ import annotations

import dataclasses
import hashlib
import importlib.util
import os
import pathlib
import sys
import typing as t

import numpy as np

from ntacomp.fast.codegen import NetworkCode
from ntacomp.fast.packing import Packing, PackingUnsupported
from ntacomp.model.ast import Network
from ntacomp.model.expr import Expr
from ntacomp.valuations import Domain

MONO, COMP, COMPARE = 0, 1, 2
COMPLETE, VIOLATED, BUDGET, DIFFERENT = 0, 1, 2, 3

WORKSPACE = 1 << 20
BUFFER = 1 << 14

__all__ = ["FastEngine", "FastResult", "PackingUnsupported", "available"]


def cache_dir() -> pathlib.Path:
    root = os.environ.get("NTACOMP_CACHE")
    if root:
        return pathlib.Path(root)
    return pathlib.Path(os.environ.get("XDG_CACHE_HOME", pathlib.Path.home() / ".cache")) / "ntacomp"


def _load(source: str) -> t.Dict[str, t.Any]:
    """Import generated source from a content-addressed file, so that numba's
    on-disk cache can skip recompilation on later runs."""
    digest = hashlib.sha256(source.encode()).hexdigest()[:20]
    name = f"ntacomp_gen_{digest}"
    if name in sys.modules:
        return vars(sys.modules[name])
    d = cache_dir()
    d.mkdir(parents=True, exist_ok=True)
    path = d / f"{name}.py"
    if not path.exists():
        tmp = path.with_suffix(f".{os.getpid()}.tmp")
        tmp.write_text(source, encoding="utf-8")
        os.replace(tmp, path)
    spec = importlib.util.spec_from_file_location(name, path)
    assert spec is not None and spec.loader is not None
    mod = importlib.util.module_from_spec(spec)
    sys.modules[name] = mod
    spec.loader.exec_module(mod)
    return vars(mod)


def available() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:  # pragma: no cover
        return False
    return True


@dataclasses.dataclass
class FastResult:
    status: int
    states: int
    edges: int
    hit: t.Optional[int]
    packed: np.ndarray
    parents: np.ndarray
    diff: t.Optional[t.Tuple[str, int, int]] = None  # (side having it, target, label)


class FastEngine:
    """Compile ``net`` once; ``prop`` is the state predicate searched for
    violations (``None`` means no property)."""

    def __init__(self, net: Network, prop: t.Optional[Expr] = None) -> None:
        self.net = net
        variables = net.variables()
        # states are reported over every network variable; globals that no
        # automaton (or the property) mentions never change and are not packed
        self.domain = Domain(variables.values())
        used = {a.loc_name for a in net.automata}
        for a in net.automata:
            used.update(v.name for v in a.variables)
        if prop is not None:
            used.update(prop.refs())
        self.packed_domain = Domain(variables[n] for n in used)
        self.packing = Packing(self.packed_domain)
        self.code = NetworkCode(net, self.packing)
        self._env = _load(self.code.source(prop))
        self.has_prop = prop is not None
        init = net.initial_values()
        self.initial_values = tuple(init[n] for n in self.domain.names)
        self._pick = [self.domain.index[n] for n in self.packed_domain.names]
        self._spread = [
            (self.packed_domain.index[n], None) if n in used else (None, init[n]) for n in self.domain.names
        ]
        self.initial = self.encode(self.initial_values)
        self._ws = (
            np.empty(WORKSPACE, np.int64),
            np.empty(WORKSPACE, np.bool_),
            np.empty(WORKSPACE, np.int64),
        )

    def encode(self, values: t.Sequence[t.Any]) -> int:
        """Pack a value tuple laid out like :attr:`domain`."""
        return self.packing.encode([values[i] for i in self._pick])

    def decode(self, s: int) -> tuple:
        packed = self.packing.decode(int(s))
        return tuple(packed[i] if i is not None else c for i, c in self._spread)

    def run(self, mode: int = MONO, budget: int = 10_000_000, check_prop: bool = False) -> FastResult:
        if check_prop and not self.has_prop:
            raise ValueError("engine was built without a property")
        status, count, edges, hit, states, parents, key, side = self._env["bfs"](
            np.int64(self.initial), mode, budget, check_prop, *self._ws
        )
        diff = None
        if status == DIFFERENT:
            diff = ("monolithic" if side == 0 else "compositional", int(key) >> 1, int(key) & 1)
        return FastResult(
            int(status),
            int(count),
            int(edges),
            None if hit < 0 else int(hit),
            states,
            parents,
            diff,
        )

    def path(self, res: FastResult, index: int) -> t.List[tuple]:
        """Decoded states from the initial one to ``index``."""
        out = []
        i = index
        while i >= 0:
            out.append(self.decode(res.packed[i]))
            i = int(res.parents[i])
        out.reverse()
        return out

    def successors(self, values: tuple, mode: int = MONO) -> t.List[t.Tuple[bool, tuple]]:
        """``(is_delay, target)`` pairs for one state."""
        out_t = np.empty(BUFFER, np.int64)
        out_a = np.empty(BUFFER, np.int64)
        s = np.int64(self.encode(values))
        if mode == MONO:
            n = self._env["mono_succ"](s, out_t, out_a)
        else:
            n = self._env["comp_succ"](s, out_t, out_a, *self._ws)
        return [(bool(out_a[k] == 1), self.decode(out_t[k])) for k in range(n)]
