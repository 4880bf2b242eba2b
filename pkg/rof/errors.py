"""
Exception hierarchy shared by every rof module.

Argument-shaped failures also derive from ValueError so plain
``except ValueError`` callers keep working.
"""

from __future__ import annotations

from typing import Optional


class RofError(Exception):
    """Base class for all rof errors."""


class FormulaSyntaxError(RofError, ValueError):
    """Formula text does not follow the grammar."""

    def __init__(self, message: str, position: Optional[int] = None):
        self.position = position
        if position is not None:
            message = f"{message} (at offset {position})"
        super().__init__(message)


class ReadOnceViolation(RofError, ValueError):
    """A variable labels more than one leaf."""


class ArityError(RofError, ValueError):
    """Children count, table length or arity bound mismatch."""


class AlphabetMismatch(RofError, ValueError):
    """Symbol or assignment outside the formula's alphabet."""


class NotNormalizedError(RofError, ValueError):
    """Formula is not in the normal form an operation requires."""


class NonMonotoneError(RofError, ValueError):
    """A monotone gate set was required."""


class InstanceTooLarge(RofError, ValueError):
    """Exhaustive enumeration bound exceeded."""


class ConfigError(RofError, ValueError):
    """Invalid parameter ledger or experiment configuration."""


class GenerationError(RofError):
    """A generator could not produce the requested instance."""


class PropertyCheckFailed(RofError):
    """An experiment's expected property did not hold."""
