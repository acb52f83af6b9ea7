"""Generate numba source for a network over packed int64 states."""

from __future__ import annotations

import typing as t

from ntacomp.model.ast import Guard, Network
from ntacomp.model.expr import Binary, Cond, Const, Expr, Ref, Unary
from ntacomp.fast.packing import Packing

TAU, DELAY = 0, 1
K_TAU, K_SEND, K_RECV = 0, 1, 2


def send_code(ch: int) -> int:
    return 2 + 2 * ch


def recv_code(ch: int) -> int:
    return 3 + 2 * ch


class ExprGen:
    def __init__(self, packing: Packing, state: str = "s", local: t.Optional[t.Dict[str, str]] = None) -> None:
        self.p = packing
        self.state = state
        self.local = local if local is not None else {}

    def read(self, name: str) -> str:
        if name in self.local:
            return self.local[name]
        return self.decode(name)

    def decode(self, name: str) -> str:
        f = self.p.by_name[name]
        s = self.state
        kind = f.var.kind
        if f.width == 0:
            if kind == "bool":
                return "False"
            return str(f.var.lo if kind == "int" else 0)
        raw = f"(({s} >> {f.offset}) & {f.mask})" if f.offset else f"({s} & {f.mask})"
        if kind == "int" and f.var.lo:
            return f"({raw} + {f.var.lo})"
        if kind == "bool":
            return f"({raw} == 1)"
        return raw

    def loc_code(self, e: Expr, other: Expr) -> t.Optional[t.Tuple[str, int]]:
        if isinstance(e, Ref) and isinstance(other, Const) and isinstance(other.value, str):
            f = self.p.by_name[e.name]
            return self.read(e.name), f.var.locations.index(other.value)
        return None

    def expr(self, e: Expr) -> str:
        if isinstance(e, Const):
            if isinstance(e.value, bool):
                return "True" if e.value else "False"
            if isinstance(e.value, str):
                raise ValueError(f"bare location name {e.value!r} outside a comparison")
            return str(e.value)
        if isinstance(e, Ref):
            return self.read(e.name)
        if isinstance(e, Unary):
            inner = self.expr(e.arg)
            return f"(not {inner})" if e.op == "!" else f"(-{inner})"
        if isinstance(e, Binary):
            if e.op in ("==", "!="):
                lc = self.loc_code(e.left, e.right) or self.loc_code(e.right, e.left)
                if lc is not None:
                    return f"({lc[0]} {e.op} {lc[1]})"
                if isinstance(e.left, Ref) and isinstance(e.right, Ref):
                    fl = self.p.by_name[e.left.name]
                    fr = self.p.by_name[e.right.name]
                    if fl.var.kind == "loc" or fr.var.kind == "loc":
                        raise ValueError("cannot compare two location variables")
            a, b = self.expr(e.left), self.expr(e.right)
            if e.op == "/":
                return f"_cdiv({a}, {b})"
            if e.op == "%":
                return f"_cmod({a}, {b})"
            if e.op == "=>":
                return f"((not {a}) or {b})"
            op = {"&&": "and", "||": "or"}.get(e.op, e.op)
            return f"({a} {op} {b})"
        if isinstance(e, Cond):
            return f"({self.expr(e.then)} if {self.expr(e.test)} else {self.expr(e.other)})"
        raise TypeError(f"not an expression: {e!r}")

    def guard(self, g: Guard) -> str:
        parts = []
        for a in g.atoms:
            left = self.read(a.clock)
            if a.other is not None:
                left = f"({left} - {self.read(a.other)})"
            parts.append(f"({left} {a.op} {a.bound})")
        if g.data != Const(True):
            parts.append(self.expr(g.data))
        return " and ".join(parts) if parts else "True"


def _chain(var: str, cases: t.Sequence[t.Tuple[int, t.List[str]]], default: t.List[str], indent: str) -> t.List[str]:
    lines = []
    first = True
    for k, body in cases:
        lines.append(f"{indent}{'if' if first else 'elif'} {var} == {k}:")
        lines.extend(f"{indent}    {b}" for b in body)
        first = False
    lines.extend(f"{indent}{b}" for b in default)
    return lines


class NetworkCode:
    """Tables and generated source for one network."""

    def __init__(self, net: Network, packing: Packing) -> None:
        self.net = net
        self.p = packing
        autos = net.automata
        self.n = len(autos)
        self.channels = sorted(net.channel_names)
        self.ch_index = {c: i for i, c in enumerate(self.channels)}
        self.bcast = [net.is_broadcast(c) for c in self.channels]
        if sum(self.bcast) > 62:
            raise ValueError("too many broadcast channels for the compiled engine")
        self.edges = []  # (automaton index, edge)
        for i, a in enumerate(autos):
            for e in a.edges:
                self.edges.append((i, e))
        self.maxloc = max(len(a.locations) for a in autos)

    # -- tables --------------------------------------------------------------
    def tables(self) -> t.Dict[str, t.Any]:
        import numpy as np

        n, L, nch = self.n, self.maxloc, max(1, len(self.channels))
        autos = self.net.automata
        loc_off = np.zeros(n, np.int64)
        loc_mask = np.zeros(n, np.int64)
        comm = np.zeros((n, L), np.bool_)
        # per (automaton, location): [start, end) into ordered edge lists
        e_start = np.zeros((n, L), np.int64)
        e_end = np.zeros((n, L), np.int64)
        u_start = np.zeros((n, L), np.int64)
        u_end = np.zeros((n, L), np.int64)
        r_start = np.zeros((n, L, nch), np.int64)
        r_end = np.zeros((n, L, nch), np.int64)
        e_list: t.List[int] = []
        u_list: t.List[int] = []
        r_list: t.List[int] = []
        kind = np.zeros(max(1, len(self.edges)), np.int64)
        chan = np.zeros(max(1, len(self.edges)), np.int64)
        ebc = np.zeros(max(1, len(self.edges)), np.bool_)
        for k, (i, e) in enumerate(self.edges):
            kind[k] = {"tau": K_TAU, "send": K_SEND, "recv": K_RECV}[e.label.kind]
            if e.label.channel is not None:
                chan[k] = self.ch_index[e.label.channel]
                ebc[k] = e.label.broadcast
        for i, a in enumerate(autos):
            f = self.p.by_name[a.loc_name]
            loc_off[i] = f.offset
            loc_mask[i] = f.mask
            ids = [k for k, (j, _) in enumerate(self.edges) if j == i]
            for li, loc in enumerate(a.locations):
                comm[i, li] = loc in a.committed
                mine = [k for k in ids if self.edges[k][1].source == loc]
                e_start[i, li] = len(e_list)
                e_list.extend(mine)
                e_end[i, li] = len(e_list)
                urg = [k for k in mine if self.edges[k][1].urgent]
                u_start[i, li] = len(u_list)
                u_list.extend(urg)
                u_end[i, li] = len(u_list)
                for c, cname in enumerate(self.channels):
                    rec = [k for k in mine if kind[k] == K_RECV and self.edges[k][1].label.channel == cname]
                    r_start[i, li, c] = len(r_list)
                    r_list.extend(rec)
                    r_end[i, li, c] = len(r_list)
        clocks = [(fld.offset, fld.mask, fld.var.hi, self._owner(fld.var.name)) for fld in self.p.fields if fld.var.kind == "clock"]
        masks = np.zeros(n, np.int64)
        for i, a in enumerate(autos):
            names = [v.name for v in a.internal] + [v.name for v in a.external] + [a.loc_name]
            masks[i] = self.p.mask(names)
        bc_all = 0
        for c, b in enumerate(self.bcast):
            if b:
                bc_all |= 1 << c
        arr = lambda xs: np.array(xs if xs else [0], np.int64)  # noqa: E731
        return {
            "NA": n,
            "NCH": len(self.channels),
            "LOC_OFF": loc_off,
            "LOC_MASK": loc_mask,
            "COMM": comm,
            "E_START": e_start,
            "E_END": e_end,
            "E_LIST": arr(e_list),
            "U_START": u_start,
            "U_END": u_end,
            "U_LIST": arr(u_list),
            "R_START": r_start,
            "R_END": r_end,
            "R_LIST": arr(r_list),
            "E_KIND": kind,
            "E_CHAN": chan,
            "E_BCAST": ebc,
            "CH_BCAST": np.array(self.bcast if self.bcast else [False], np.bool_),
            "CK_OFF": arr([c[0] for c in clocks]),
            "CK_MASK": arr([c[1] for c in clocks]),
            "CK_CEIL": arr([c[2] for c in clocks]),
            "CK_OWNER": arr([c[3] for c in clocks]),
            "NCK": len(clocks),
            "MASKS": masks,
            "MALL": int(np.bitwise_or.reduce(masks)) if n else 0,
        }

    def _table_source(self) -> str:
        import numpy as np

        lines = []
        for name, value in self.tables().items():
            if isinstance(value, np.ndarray):
                dt = "np.bool_" if value.dtype == np.bool_ else "np.int64"
                flat = [bool(x) if value.dtype == np.bool_ else int(x) for x in value.ravel()]
                lines.append(f"{name} = np.array({flat!r}, {dt}).reshape({value.shape!r})")
            else:
                lines.append(f"{name} = {int(value)}")
        return "\n".join(lines) + "\n"

    def _owner(self, name: str) -> int:
        for i, a in enumerate(self.net.automata):
            if any(v.name == name for v in a.internal):
                return i
        return -1

    # -- generated functions -------------------------------------------------
    def source(self, prop: t.Optional[Expr]) -> str:
        out = [_PRELUDE, self._table_source()]
        out += self._grd()
        out += self._upd()
        out += self._inv()
        out += self._prop(prop)
        out.append(_DRIVER)
        out += self._levels()
        return "\n".join(out) + "\n"

    def _grd(self) -> t.List[str]:
        g = ExprGen(self.p)
        cases = []
        for k, (_, e) in enumerate(self.edges):
            if e.guard.trivial:
                continue
            cases.append((k, [f"return {g.guard(e.guard)}"]))
        return ["@njit(cache=True)", "def grd(k, s):"] + _chain("k", cases, ["return True"], "    ") + [""]

    def _upd(self) -> t.List[str]:
        cases = []
        autos = self.net.automata
        for k, (i, e) in enumerate(self.edges):
            local: t.Dict[str, str] = {}
            g = ExprGen(self.p, "s", local)
            body: t.List[str] = []
            written: t.List[str] = []
            for n_, asg in enumerate(e.updates):
                f = self.p.by_name[asg.target]
                var = f.var
                tmp = f"w{n_}"
                if var.kind == "clock":
                    body.append(f"{tmp} = {min(int(asg.value.value), var.hi)}")  # type: ignore[attr-defined]
                else:
                    body.append(f"{tmp} = {g.expr(asg.value)}")
                    if var.kind == "int":
                        body.append(f"if {tmp} < {var.lo} or {tmp} > {var.hi}:")
                        body.append("    return False, s")
                    elif var.kind == "bool":
                        body.append(f"{tmp} = True if {tmp} else False")
                local[asg.target] = tmp
                if asg.target not in written:
                    written.append(asg.target)
            out = "s"
            for name in written:
                f = self.p.by_name[name]
                val = local[name]
                if f.var.kind == "int":
                    code = f"({val} - {f.var.lo})" if f.var.lo else val
                elif f.var.kind == "bool":
                    code = f"(1 if {val} else 0)"
                else:
                    code = val
                if f.width:
                    body.append(f"s2 = ({out} & {f.clear}) | ({code} << {f.offset})")
                    out = "s2"
            lf = self.p.by_name[autos[i].loc_name]
            tgt = autos[i].locations.index(e.target)
            if lf.width:
                body.append(f"s2 = ({out} & {lf.clear}) | {tgt << lf.offset}")
                out = "s2"
            body.append(f"return True, {out}")
            cases.append((k, body))
        return ["@njit(cache=True)", "def upd(k, s):"] + _chain("k", cases, ["return False, s"], "    ") + [""]

    def _inv(self) -> t.List[str]:
        g = ExprGen(self.p)
        cases = []
        for i, a in enumerate(self.net.automata):
            inner = []
            for li, loc in enumerate(a.locations):
                inv = a.invariant(loc)
                if not inv.trivial:
                    inner.append((li, [f"return {g.guard(inv)}"]))
            if not inner:
                continue
            f = self.p.by_name[a.loc_name]
            body = [f"l = {g.decode(a.loc_name)}" if f.width else "l = 0"]
            body += _chain("l", inner, ["return True"], "")
            cases.append((i, body))
        lines = ["@njit(cache=True)", "def inv(i, s):"] + _chain("i", cases, ["return True"], "    ") + [""]
        lines += ["@njit(cache=True)", "def inv_all(s):"]
        for i in range(self.n):
            lines.append(f"    if not inv({i}, s):")
            lines.append("        return False")
        lines += ["    return True", ""]
        return lines

    def _prop(self, prop: t.Optional[Expr]) -> t.List[str]:
        body = "True" if prop is None else ExprGen(self.p).expr(prop)
        return ["@njit(cache=True)", "def prop(s):", f"    return {body}", ""]

    def _levels(self) -> t.List[str]:
        lines = [
            "@njit(cache=True)",
            "def comp_0(s, wa, wb, wt, top):",
            f"    return leaf(0, s & {int(self.tables_masks()[0])}, wa, wb, wt, top)",
            "",
        ]
        masks = self.tables_masks()
        acc = masks[0]
        for k in range(1, self.n):
            lines.append(_LEVEL.format(k=k, prev=k - 1, ML=int(acc), MR=int(masks[k])))
            acc |= masks[k]
        lines.append(
            f"@njit(cache=True)\ndef comp_top(s, wa, wb, wt, top):\n    return comp_{self.n - 1}(s, wa, wb, wt, top)\n"
        )
        return lines

    def tables_masks(self) -> t.List[int]:
        out = []
        for a in self.net.automata:
            names = [v.name for v in a.internal] + [v.name for v in a.external] + [a.loc_name]
            out.append(self.p.mask(names))
        return out


_PRELUDE = '''
import numpy as np
from numba import njit


@njit(cache=True)
def _cdiv(a, b):
    if b == 0:
        raise ZeroDivisionError("division by zero in model expression")
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


@njit(cache=True)
def _cmod(a, b):
    return a - b * _cdiv(a, b)
'''


_DRIVER = '''
@njit(cache=True)
def tick(s, owner):
    for c in range(NCK):
        off = CK_OFF[c]
        if owner >= 0 and ((MASKS[owner] >> off) & 1) == 0:
            continue
        v = (s >> off) & CK_MASK[c]
        if v < CK_CEIL[c]:
            s = s + (1 << off)
    return s


@njit(cache=True)
def _push(out_t, out_a, n, tgt, lab):
    if n >= out_t.shape[0]:
        raise RuntimeError("successor buffer overflow")
    out_t[n] = tgt
    out_a[n] = lab
    return n + 1


@njit(cache=True)
def mono_succ(s, out_t, out_a):
    locs = np.empty(NA, np.int64)
    comm = np.empty(NA, np.bool_)
    anyc = False
    for i in range(NA):
        l = (s >> LOC_OFF[i]) & LOC_MASK[i]
        locs[i] = l
        comm[i] = COMM[i, l]
        if comm[i]:
            anyc = True
    n = 0
    cand = np.empty((NA, 64), np.int64)
    ccount = np.zeros(NA, np.int64)
    cown = np.zeros(NA, np.int64)
    idx = np.zeros(NA, np.int64)
    for i in range(NA):
        li = locs[i]
        for p in range(E_START[i, li], E_END[i, li]):
            e = E_LIST[p]
            kind = E_KIND[e]
            if kind == 2:
                continue
            if not grd(e, s):
                continue
            if kind == 0:
                if anyc and not comm[i]:
                    continue
                ok, s2 = upd(e, s)
                if ok and inv_all(s2):
                    n = _push(out_t, out_a, n, s2, 0)
            elif not E_BCAST[e]:
                ch = E_CHAN[e]
                for j in range(NA):
                    if j == i:
                        continue
                    lj = locs[j]
                    for q in range(R_START[j, lj, ch], R_END[j, lj, ch]):
                        r = R_LIST[q]
                        if not grd(r, s):
                            continue
                        if anyc and not (comm[i] or comm[j]):
                            continue
                        ok, s1 = upd(e, s)
                        if not ok:
                            break
                        ok, s2 = upd(r, s1)
                        if ok and inv_all(s2):
                            n = _push(out_t, out_a, n, s2, 0)
            else:
                ok, s1 = upd(e, s)
                if not ok:
                    continue
                ch = E_CHAN[e]
                nr = 0
                anyrc = False
                for j in range(NA):
                    if j == i:
                        continue
                    lj = locs[j]
                    cnt = 0
                    for q in range(R_START[j, lj, ch], R_END[j, lj, ch]):
                        r = R_LIST[q]
                        if not grd(r, s):
                            continue
                        ok2, tj = upd(r, s1)
                        if ok2 and inv(j, tj):
                            if cnt >= 64:
                                raise RuntimeError("too many enabled receiving edges")
                            cand[nr, cnt] = r
                            cnt += 1
                    if cnt > 0:
                        ccount[nr] = cnt
                        cown[nr] = j
                        if comm[j]:
                            anyrc = True
                        nr += 1
                if anyc and not (comm[i] or anyrc):
                    continue
                for q in range(nr):
                    idx[q] = 0
                while True:
                    s2 = s1
                    ok = True
                    for q in range(nr):
                        ok, s2 = upd(cand[q, idx[q]], s2)
                        if not ok:
                            break
                    if ok and nr > 1:
                        s3 = s1
                        ok3 = True
                        for q in range(nr - 1, -1, -1):
                            ok3, s3 = upd(cand[q, idx[q]], s3)
                            if not ok3:
                                break
                        if (not ok3) or s3 != s2:
                            raise RuntimeError("broadcast receivers' updates do not commute")
                    if ok and inv_all(s2):
                        n = _push(out_t, out_a, n, s2, 0)
                    q = 0
                    while q < nr:
                        idx[q] += 1
                        if idx[q] < ccount[q]:
                            break
                        idx[q] = 0
                        q += 1
                    if q == nr:
                        break
    if anyc:
        return n
    for i in range(NA):
        li = locs[i]
        for p in range(U_START[i, li], U_END[i, li]):
            if grd(U_LIST[p], s):
                return n
    s2 = tick(s, -1)
    if inv_all(s2):
        n = _push(out_t, out_a, n, s2, 1)
    return n


@njit(cache=True)
def _emit(wa, wb, wt, pos, a, b, tgt):
    if pos >= wa.shape[0]:
        raise RuntimeError("workspace overflow")
    wa[pos] = a
    wb[pos] = b
    wt[pos] = tgt
    return pos + 1


@njit(cache=True)
def leaf(i, q, wa, wb, wt, top):
    l = (q >> LOC_OFF[i]) & LOC_MASK[i]
    c = COMM[i, l]
    pos = top
    heard = 0
    urgent = False
    for p in range(E_START[i, l], E_END[i, l]):
        e = E_LIST[p]
        if not grd(e, q):
            continue
        if U_START[i, l] < U_END[i, l]:
            for u in range(U_START[i, l], U_END[i, l]):
                if U_LIST[u] == e:
                    urgent = True
        ok, q2 = upd(e, q)
        if not ok or not inv(i, q2):
            continue
        kind = E_KIND[e]
        if kind == 0:
            a = 0
        elif kind == 1:
            a = 2 + 2 * E_CHAN[e]
        else:
            a = 3 + 2 * E_CHAN[e]
            if E_BCAST[e]:
                heard |= 1 << E_CHAN[e]
        pos = _emit(wa, wb, wt, pos, a, c, q2)
    if (not c) and (not urgent):
        q2 = tick(q, i)
        if inv(i, q2):
            pos = _emit(wa, wb, wt, pos, 1, False, q2)
    for ch in range(NCH):
        if CH_BCAST[ch] and not (heard >> ch) & 1:
            pos = _emit(wa, wb, wt, pos, 3 + 2 * ch, False, q)
    return top, pos - top, pos


@njit(cache=True)
def comp_succ(s, out_t, out_a, wa, wb, wt):
    st, cnt, top = comp_top(s & MALL, wa, wb, wt, 0)
    rest = s & ~MALL
    comm = False
    for x in range(st, st + cnt):
        if wb[x]:
            comm = True
            break
    n = 0
    for x in range(st, st + cnt):
        a = wa[x]
        if a == 0 or a == 1:
            n = _push(out_t, out_a, n, wt[x] | rest, a)
        elif (a & 1) == 1:
            continue
        elif not CH_BCAST[(a - 2) >> 1]:
            continue
        elif comm and not wb[x]:
            continue
        else:
            n = _push(out_t, out_a, n, wt[x] | rest, 0)
    return n


@njit(cache=True)
def _hash(s):
    h = np.uint64(s)
    h = (h ^ (h >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    h = (h ^ (h >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    h = h ^ (h >> np.uint64(31))
    return h


@njit(cache=True)
def _insert(table, states, count, s):
    mask = table.shape[0] - 1
    h = np.int64(_hash(s) & np.uint64(mask))
    while True:
        v = table[h]
        if v < 0:
            table[h] = count
            return count, True
        if states[v] == s:
            return v, False
        h = (h + 1) & mask


@njit(cache=True)
def _rehash(table_size, states, count):
    table = np.full(table_size, -1, np.int64)
    mask = table_size - 1
    for v in range(count):
        h = np.int64(_hash(states[v]) & np.uint64(mask))
        while table[h] >= 0:
            h = (h + 1) & mask
        table[h] = v
    return table


@njit(cache=True)
def _keys(ts, labs, n):
    k = np.empty(n, np.int64)
    for x in range(n):
        k[x] = ts[x] * 2 + labs[x]
    return np.unique(k)


@njit(cache=True)
def bfs(init, mode, budget, check_prop, wa, wb, wt):
    """mode 0: monolithic, 1: compositional, 2: monolithic frontier with
    per-state comparison against the compositional successors.

    status: 0 complete, 1 property violated at ``hit``, 2 budget exceeded,
    3 successor sets differ at ``hit``."""
    cap = 1 << 12
    states = np.empty(cap, np.int64)
    parents = np.empty(cap, np.int64)
    table = np.full(cap * 2, -1, np.int64)
    out_t = np.empty(1 << 14, np.int64)
    out_a = np.empty(1 << 14, np.int64)
    out2_t = np.empty(1 << 14, np.int64)
    out2_a = np.empty(1 << 14, np.int64)
    states[0] = init
    parents[0] = -1
    _insert(table, states, 0, init)
    count = 1
    edges = 0
    head = 0
    diff_key = np.int64(-1)
    diff_side = 0
    if check_prop and not prop(init):
        return 1, count, edges, 0, states[:count], parents[:count], diff_key, diff_side
    while head < count:
        s = states[head]
        if mode == 1:
            n = comp_succ(s, out_t, out_a, wa, wb, wt)
        else:
            n = mono_succ(s, out_t, out_a)
        if mode == 2:
            n2 = comp_succ(s, out2_t, out2_a, wa, wb, wt)
            k1 = _keys(out_t, out_a, n)
            k2 = _keys(out2_t, out2_a, n2)
            same = k1.shape[0] == k2.shape[0]
            if same:
                for x in range(k1.shape[0]):
                    if k1[x] != k2[x]:
                        same = False
                        break
            if not same:
                a = 0
                b = 0
                while a < k1.shape[0] or b < k2.shape[0]:
                    if b >= k2.shape[0] or (a < k1.shape[0] and k1[a] < k2[b]):
                        diff_key = k1[a]
                        diff_side = 0
                        break
                    if a >= k1.shape[0] or k2[b] < k1[a]:
                        diff_key = k2[b]
                        diff_side = 1
                        break
                    a += 1
                    b += 1
                return 3, count, edges, head, states[:count], parents[:count], diff_key, diff_side
            edges += k1.shape[0]
        for x in range(n):
            tgt = out_t[x]
            if mode != 2:
                edges += 1
            if (count + 1) * 2 > table.shape[0]:
                if count >= budget:
                    return 2, count, edges, -1, states[:count], parents[:count], diff_key, diff_side
                table = _rehash(table.shape[0] * 2, states, count)
            if count >= states.shape[0]:
                grown = np.empty(states.shape[0] * 2, np.int64)
                grown[:count] = states[:count]
                states = grown
                grown_p = np.empty(parents.shape[0] * 2, np.int64)
                grown_p[:count] = parents[:count]
                parents = grown_p
            v, fresh = _insert(table, states, count, tgt)
            if fresh:
                if count >= budget:
                    return 2, count, edges, -1, states[:count], parents[:count], diff_key, diff_side
                states[count] = tgt
                parents[count] = head
                count += 1
                if check_prop and not prop(tgt):
                    return 1, count, edges, count - 1, states[:count], parents[:count], diff_key, diff_side
        head += 1
    return 0, count, edges, -1, states[:count], parents[:count], diff_key, diff_side
'''


_LEVEL = '''
@njit(cache=True)
def comp_{k}(s, wa, wb, wt, top):
    ML = {ML}
    MR = {MR}
    SH = ML & MR
    s = s & (ML | MR)
    r = s & ML
    q = s & MR
    ls, lc, top = comp_{prev}(r, wa, wb, wt, top)
    rs, rc, top = leaf({k}, q, wa, wb, wt, top)
    commL = False
    for x in range(ls, ls + lc):
        if wb[x]:
            commL = True
            break
    commR = False
    for x in range(rs, rs + rc):
        if wb[x]:
            commR = True
            break
    lsub_s = np.zeros(lc, np.int64)
    lsub_c = np.zeros(lc, np.int64)
    for x in range(lc):
        a = wa[ls + x]
        if a >= 2 and (a & 1) == 0:
            qq = (q & ~SH) | (wt[ls + x] & SH)
            st, ct, top = leaf({k}, qq, wa, wb, wt, top)
            lsub_s[x] = st
            lsub_c[x] = ct
    rsub_s = np.zeros(rc, np.int64)
    rsub_c = np.zeros(rc, np.int64)
    for x in range(rc):
        a = wa[rs + x]
        if a >= 2 and (a & 1) == 0:
            rr = (r & ~SH) | (wt[rs + x] & SH)
            st, ct, top = comp_{prev}(rr, wa, wb, wt, top)
            rsub_s[x] = st
            rsub_c[x] = ct
    out = top
    pos = top
    for x in range(lc):
        a = wa[ls + x]
        b = wb[ls + x]
        r2 = wt[ls + x]
        if a == 0:
            if b or not commR:
                pos = _emit(wa, wb, wt, pos, 0, b, (r2 & ML) | (s & ~ML))
        elif a == 1:
            for y in range(rs, rs + rc):
                if wa[y] == 1:
                    q2 = wt[y]
                    if ((r2 ^ q2) & SH) == 0:
                        pos = _emit(wa, wb, wt, pos, 1, False, (r2 & ML) | (q2 & MR))
        else:
            ch = (a - 2) >> 1
            if CH_BCAST[ch]:
                if (a & 1) == 0:
                    for y in range(lsub_s[x], lsub_s[x] + lsub_c[x]):
                        if wa[y] == a + 1:
                            q2 = wt[y]
                            if ((r2 ^ q2) & SH) == 0:
                                pos = _emit(wa, wb, wt, pos, a, b or wb[y], (r2 & ML) | (q2 & MR))
                else:
                    for y in range(rs, rs + rc):
                        if wa[y] == a:
                            q2 = wt[y]
                            if ((r2 ^ q2) & SH) == 0:
                                pos = _emit(wa, wb, wt, pos, a, b or wb[y], (r2 & ML) | (q2 & MR))
            else:
                pos = _emit(wa, wb, wt, pos, a, b, (r2 & ML) | (s & ~ML))
                if (a & 1) == 0:
                    for y in range(lsub_s[x], lsub_s[x] + lsub_c[x]):
                        if wa[y] == a + 1:
                            bb = b or wb[y]
                            if (commL or commR) and not bb:
                                continue
                            q2 = wt[y]
                            pos = _emit(wa, wb, wt, pos, 0, bb, (q2 & MR) | (r2 & ML & ~MR))
    for x in range(rc):
        a = wa[rs + x]
        b = wb[rs + x]
        q2 = wt[rs + x]
        if a == 0:
            if b or not commL:
                pos = _emit(wa, wb, wt, pos, 0, b, (q2 & MR) | (s & ~MR))
        elif a == 1:
            continue
        else:
            ch = (a - 2) >> 1
            if CH_BCAST[ch]:
                if (a & 1) == 0:
                    for y in range(rsub_s[x], rsub_s[x] + rsub_c[x]):
                        if wa[y] == a + 1:
                            r2 = wt[y]
                            if ((r2 ^ q2) & SH) == 0:
                                pos = _emit(wa, wb, wt, pos, a, b or wb[y], (r2 & ML) | (q2 & MR))
            else:
                pos = _emit(wa, wb, wt, pos, a, b, (q2 & MR) | (s & ~MR))
                if (a & 1) == 0:
                    for y in range(rsub_s[x], rsub_s[x] + rsub_c[x]):
                        if wa[y] == a + 1:
                            bb = b or wb[y]
                            if (commL or commR) and not bb:
                                continue
                            r2 = wt[y]
                            pos = _emit(wa, wb, wt, pos, 0, bb, (r2 & ML) | (q2 & MR & ~ML))
    return out, pos - out, pos
'''
