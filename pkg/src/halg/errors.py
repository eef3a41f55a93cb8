"""Coded exceptions shared across the package.

Each error carries a stable machine-readable ``code`` (surfaced by the CLI in
machine-format reports) plus a human message.  Library call sites raise these
instead of bare ValueErrors whenever the failure is part of the documented
contract of an operation.
"""

from __future__ import annotations


class HalgError(Exception):
    code = "ERROR"

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details

    def __str__(self):
        base = super().__str__()
        if self.details:
            extras = ", ".join(f"{k}={v}" for k, v in sorted(self.details.items()))
            return f"{base} ({extras})"
        return base


class InvalidInput(HalgError):
    """Malformed structural data: bad names, shapes, degrees or tables."""

    code = "INVALID_INPUT"


class ParityError(HalgError):
    """A graded-degree constraint is violated (wrong parity or degree)."""

    code = "PARITY_ERROR"


class DegenerateForm(HalgError):
    """The pairing is singular where an inverse (or partial inverse) is needed."""

    code = "DEGENERATE_FORM"


class HomotopyNotSquareZero(HalgError):
    code = "H_NOT_SQUARE_ZERO"


class HomotopyNotCompatible(HalgError):
    code = "H_NOT_COMPATIBLE"


class SeedNotCocycle(HalgError):
    code = "SEED_NOT_COCYCLE"


class MorphismNotCertified(HalgError):
    code = "MORPHISM_NOT_CERTIFIED"


class UncertifiedBase(HalgError):
    code = "UNCERTIFIED_BASE"


class InconsistentSystem(HalgError):
    """An exact linear solve has no solution; details carry a witness."""

    code = "INCONSISTENT"


class ParseError(HalgError):
    """Workspace file is not syntactically valid; carries line/column."""

    code = "PARSE_ERROR"

    def __init__(self, message, line=None, column=None):
        super().__init__(message, line=line, column=column)
        self.line = line
        self.column = column


class ValidationError(HalgError):
    """Workspace file is well-formed but semantically invalid."""

    code = "VALIDATION_ERROR"

    def __init__(self, message, obj=None):
        super().__init__(message, obj=obj)
        self.obj = obj
