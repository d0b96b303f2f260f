"""Exception hierarchy shared by all evcsguard modules."""

from __future__ import annotations


class EvcsGuardError(Exception):
    """Base class for domain and validation errors (CLI exit status 1)."""


class ParseError(EvcsGuardError):
    """Malformed input document; carries the offending position."""

    def __init__(self, message: str, line: int = 0, col: int = 0, source: str = "") -> None:
        self.line = line
        self.col = col
        self.source = source
        where = f"{source}:" if source else ""
        super().__init__(f"{where}{line}:{col}: {message}")
        self.message = message


class ValidationError(EvcsGuardError):
    pass


class CycleError(ValidationError):
    pass


class OverflowLimitError(EvcsGuardError):
    """A combinatorial or state-space cap was exceeded."""


class InfeasibleError(EvcsGuardError):
    def __init__(self, message: str, uncovered: list | None = None) -> None:
        super().__init__(message)
        self.uncovered = uncovered or []


class UnknownSymbolError(EvcsGuardError):
    pass


class NoAdmissiblePathError(EvcsGuardError):
    """Every state sequence has zero probability for the observations."""


class BeliefCollapseError(EvcsGuardError):
    pass


class ConfigError(EvcsGuardError):
    pass
