"""Bit-field packing of valuations into a single non-negative int64."""

from __future__ import annotations

import dataclasses
import typing as t

from ntacomp.valuations import Domain, Var

MAX_BITS = 61


class PackingUnsupported(ValueError):
    pass


@dataclasses.dataclass(frozen=True)
class Field:
    var: Var
    offset: int
    width: int

    @property
    def mask(self) -> int:
        return (1 << self.width) - 1

    @property
    def clear(self) -> int:
        """``~(mask << offset)`` as a signed 64-bit literal."""
        return ~(self.mask << self.offset)

    def code(self, value: t.Any) -> int:
        v = self.var
        if v.kind == "int":
            return value - v.lo
        if v.kind == "bool":
            return int(bool(value))
        if v.kind == "loc":
            return v.locations.index(value)
        return value

    def value(self, code: int) -> t.Any:
        v = self.var
        if v.kind == "int":
            return code + v.lo
        if v.kind == "bool":
            return bool(code)
        if v.kind == "loc":
            return v.locations[code]
        return code


class Packing:
    def __init__(self, domain: Domain) -> None:
        self.domain = domain
        fields = []
        off = 0
        for var in domain.vars:
            size = len(var.values())
            width = (size - 1).bit_length() if size > 1 else 0
            fields.append(Field(var, off, width))
            off += width
        if off > MAX_BITS:
            raise PackingUnsupported(f"states need {off} bits; the compiled engine supports {MAX_BITS}")
        self.bits = off
        self.fields = tuple(fields)
        self.by_name = {f.var.name: f for f in fields}

    def encode(self, values: t.Sequence[t.Any]) -> int:
        s = 0
        for f, v in zip(self.fields, values):
            s |= f.code(v) << f.offset
        return s

    def decode(self, s: int) -> tuple:
        return tuple(f.value((s >> f.offset) & f.mask) for f in self.fields)

    def mask(self, names: t.Iterable[str]) -> int:
        m = 0
        for n in names:
            f = self.by_name[n]
            m |= f.mask << f.offset
        return m
