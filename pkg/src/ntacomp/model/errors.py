from __future__ import annotations

import typing as t


class ModelError(ValueError):
    """Base class for problems found while reading a model.

    ``line``/``column`` are 1-based and refer to the source text (0 if the
    position is unknown).
    """

    kind = "ModelError"

    def __init__(self, message: str, line: int = 0, column: int = 0, source: t.Optional[str] = None) -> None:
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        where = f"{source or '<model>'}:{line}:{column}: " if line else ""
        super().__init__(f"{where}{self.kind}: {message}")

    @property
    def diagnostics(self) -> t.List[t.Tuple[int, int, str, str]]:
        return [(self.line, self.column, self.kind, self.message)]


class ModelSyntaxError(ModelError):
    kind = "SyntaxError"


class UnboundName(ModelError):
    kind = "UnboundName"


class ModelTypeError(ModelError):
    kind = "TypeError"


class DuplicateDeclaration(ModelError):
    kind = "DuplicateDeclaration"


class InvalidModel(ModelError):
    """Raised when an operation needs a model that passes validation."""

    kind = "InvalidModel"
