"""Expression trees shared by guards, invariants, updates and properties.

After instantiation every variable reference is a flattened name: globals keep
their declared name (array elements become ``arr[3]``), automaton locals are
prefixed with the instance (``Consumer[1].x``) and location variables are
written ``loc(Consumer[1])``.
"""

from __future__ import annotations

import dataclasses
import typing as t


class ModelRuntimeError(RuntimeError):
    """Raised when evaluating a model hits an error (division by zero, an
    out-of-range assignment, ...)."""


@dataclasses.dataclass(frozen=True)
class Expr:
    def refs(self) -> t.FrozenSet[str]:
        out: t.Set[str] = set()
        _collect_refs(self, out)
        return frozenset(out)


@dataclasses.dataclass(frozen=True)
class Const(Expr):
    value: t.Union[int, bool, str]


@dataclasses.dataclass(frozen=True)
class Ref(Expr):
    name: str


@dataclasses.dataclass(frozen=True)
class Unary(Expr):
    op: str
    arg: Expr


@dataclasses.dataclass(frozen=True)
class Binary(Expr):
    op: str
    left: Expr
    right: Expr


@dataclasses.dataclass(frozen=True)
class Cond(Expr):
    test: Expr
    then: Expr
    other: Expr


TRUE = Const(True)
FALSE = Const(False)

ARITH_OPS = ("+", "-", "*", "/", "%")
COMPARE_OPS = ("==", "!=", "<", "<=", ">", ">=")
LOGIC_OPS = ("&&", "||", "=>")


def _collect_refs(e: Expr, out: t.Set[str]) -> None:
    if isinstance(e, Ref):
        out.add(e.name)
    elif isinstance(e, Unary):
        _collect_refs(e.arg, out)
    elif isinstance(e, Binary):
        _collect_refs(e.left, out)
        _collect_refs(e.right, out)
    elif isinstance(e, Cond):
        _collect_refs(e.test, out)
        _collect_refs(e.then, out)
        _collect_refs(e.other, out)


def conj(parts: t.Iterable[Expr]) -> Expr:
    parts = [p for p in parts if p != TRUE]
    if not parts:
        return TRUE
    out = parts[0]
    for p in parts[1:]:
        out = Binary("&&", out, p)
    return out


def disj(parts: t.Iterable[Expr]) -> Expr:
    parts = [p for p in parts if p != FALSE]
    if not parts:
        return FALSE
    out = parts[0]
    for p in parts[1:]:
        out = Binary("||", out, p)
    return out


def c_div(a: int, b: int) -> int:
    if b == 0:
        raise ModelRuntimeError("division by zero")
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def c_mod(a: int, b: int) -> int:
    if b == 0:
        raise ModelRuntimeError("modulo by zero")
    return a - b * c_div(a, b)


def _apply(op: str, a: t.Any, b: t.Any) -> t.Any:
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        return c_div(a, b)
    if op == "%":
        return c_mod(a, b)
    if op == "==":
        return a == b
    if op == "!=":
        return a != b
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    if op == ">=":
        return a >= b
    if op == "&&":
        return a and b
    if op == "||":
        return a or b
    if op == "=>":
        return (not a) or b
    raise ValueError(f"unknown operator {op}")


def fold(e: Expr) -> Expr:
    """Constant-fold an expression bottom-up."""
    if isinstance(e, (Const, Ref)):
        return e
    if isinstance(e, Unary):
        arg = fold(e.arg)
        if isinstance(arg, Const):
            return Const(not arg.value) if e.op == "!" else Const(-arg.value)
        return Unary(e.op, arg)
    if isinstance(e, Binary):
        left, right = fold(e.left), fold(e.right)
        if isinstance(left, Const) and isinstance(right, Const):
            return Const(_apply(e.op, left.value, right.value))
        if e.op == "&&":
            if left == TRUE:
                return right
            if right == TRUE:
                return left
            if FALSE in (left, right):
                return FALSE
        if e.op == "||":
            if left == FALSE:
                return right
            if right == FALSE:
                return left
            if TRUE in (left, right):
                return TRUE
        if e.op == "=>":
            if left == TRUE:
                return right
            if left == FALSE or right == TRUE:
                return TRUE
        return Binary(e.op, left, right)
    if isinstance(e, Cond):
        test = fold(e.test)
        then, other = fold(e.then), fold(e.other)
        if isinstance(test, Const):
            return then if test.value else other
        return Cond(test, then, other)
    raise TypeError(f"not an expression: {e!r}")


def substitute(e: Expr, env: t.Mapping[str, Expr]) -> Expr:
    if isinstance(e, Ref):
        return env.get(e.name, e)
    if isinstance(e, Unary):
        return Unary(e.op, substitute(e.arg, env))
    if isinstance(e, Binary):
        return Binary(e.op, substitute(e.left, env), substitute(e.right, env))
    if isinstance(e, Cond):
        return Cond(substitute(e.test, env), substitute(e.then, env), substitute(e.other, env))
    return e


# ---------------------------------------------------------------------------
# Compilation to Python source.  ``lookup`` turns a variable name into a
# Python expression (for example ``s[4]``).

_PY_OPS = {"&&": "and", "||": "or", "==": "==", "!=": "!=", "<": "<", "<=": "<=",
           ">": ">", ">=": ">=", "+": "+", "-": "-", "*": "*"}


def to_python(e: Expr, lookup: t.Callable[[str], str]) -> str:
    if isinstance(e, Const):
        return repr(e.value)
    if isinstance(e, Ref):
        return lookup(e.name)
    if isinstance(e, Unary):
        inner = to_python(e.arg, lookup)
        return f"(not {inner})" if e.op == "!" else f"(-{inner})"
    if isinstance(e, Binary):
        a, b = to_python(e.left, lookup), to_python(e.right, lookup)
        if e.op == "/":
            return f"_div({a}, {b})"
        if e.op == "%":
            return f"_mod({a}, {b})"
        if e.op == "=>":
            return f"((not {a}) or {b})"
        return f"({a} {_PY_OPS[e.op]} {b})"
    if isinstance(e, Cond):
        return f"({to_python(e.then, lookup)} if {to_python(e.test, lookup)} else {to_python(e.other, lookup)})"
    raise TypeError(f"not an expression: {e!r}")


RUNTIME_GLOBALS = {"_div": c_div, "_mod": c_mod, "ModelRuntimeError": ModelRuntimeError}


def compile_predicate(e: Expr, lookup: t.Callable[[str], str], arg: str = "s") -> t.Callable[[t.Any], bool]:
    src = f"lambda {arg}: bool({to_python(e, lookup)})"
    return eval(src, dict(RUNTIME_GLOBALS))


def evaluate(e: Expr, env: t.Mapping[str, t.Any]) -> t.Any:
    """Direct (uncompiled) evaluation against a name-keyed mapping."""
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Ref):
        return env[e.name]
    if isinstance(e, Unary):
        v = evaluate(e.arg, env)
        return (not v) if e.op == "!" else -v
    if isinstance(e, Binary):
        a = evaluate(e.left, env)
        if e.op == "&&" and not a:
            return False
        if e.op == "||" and a:
            return True
        if e.op == "=>" and not a:
            return True
        b = evaluate(e.right, env)
        if e.op in ("&&", "||", "=>"):
            return bool(b)
        return _apply(e.op, a, b)
    if isinstance(e, Cond):
        return evaluate(e.then, env) if evaluate(e.test, env) else evaluate(e.other, env)
    raise TypeError(f"not an expression: {e!r}")


# ---------------------------------------------------------------------------
# Printing

_PREC = {"=>": 1, "||": 2, "&&": 3, "==": 4, "!=": 4, "<": 5, "<=": 5, ">": 5, ">=": 5,
         "+": 6, "-": 6, "*": 7, "/": 7, "%": 7}


def show(e: Expr, name: t.Callable[[str], str] = lambda n: n, prec: int = 0) -> str:
    if isinstance(e, Const):
        if isinstance(e.value, bool):
            return "true" if e.value else "false"
        if isinstance(e.value, int) and e.value < 0:
            s = str(e.value)
            return f"({s})" if prec > 0 else s
        return str(e.value)
    if isinstance(e, Ref):
        return name(e.name)
    if isinstance(e, Unary):
        return e.op + show(e.arg, name, 9)
    if isinstance(e, Binary):
        p = _PREC[e.op]
        if e.op == "=>":
            s = f"{show(e.left, name, p + 1)} => {show(e.right, name, p)}"
        else:
            s = f"{show(e.left, name, p)} {e.op} {show(e.right, name, p + 1)}"
        return f"({s})" if p < prec else s
    if isinstance(e, Cond):
        s = f"{show(e.test, name, 1)} ? {show(e.then, name, 1)} : {show(e.other, name, 0)}"
        return f"({s})" if prec > 0 else s
    raise TypeError(f"not an expression: {e!r}")
