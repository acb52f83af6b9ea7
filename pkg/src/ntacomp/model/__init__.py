"""Syntactic models: expressions, automata, networks, the DSL reader and printer."""

from ntacomp.model.ast import (
    Assign,
    ClockAtom,
    Edge,
    Guard,
    Label,
    Network,
    Property,
    TimedAutomaton,
)
from ntacomp.model.errors import (
    DuplicateDeclaration,
    InvalidModel,
    ModelError,
    ModelSyntaxError,
    ModelTypeError,
    UnboundName,
)
from ntacomp.model.parser import load_model, parse_model

__all__ = [
    "Assign",
    "ClockAtom",
    "Edge",
    "Guard",
    "Label",
    "Network",
    "Property",
    "TimedAutomaton",
    "DuplicateDeclaration",
    "InvalidModel",
    "ModelError",
    "ModelSyntaxError",
    "ModelTypeError",
    "UnboundName",
    "load_model",
    "parse_model",
]
