"""Exception hierarchy shared by the compiler, the engines and the CLI."""

from __future__ import annotations


class ParemError(Exception):
    """Base class for every error raised by this package."""


# -- pattern language ---------------------------------------------------------


class RegexError(ParemError, ValueError):
    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class TrailingBackslash(RegexError):
    pass


class StrayRangeDots(RegexError):
    pass


class UnbalancedParen(RegexError):
    pass


class EmptySubexpression(RegexError):
    pass


class InvalidRange(RegexError):
    pass


# -- automata -----------------------------------------------------------------


class AutomatonError(ParemError, ValueError):
    pass


class StateExplosion(AutomatonError):
    def __init__(self, cap: int):
        super().__init__(f"subset construction exceeded the cap of {cap} DFA states")
        self.cap = cap


class LiteralNotInAlphabet(AutomatonError):
    pass


class InvariantViolation(AutomatonError):
    pass


class TableParseError(AutomatonError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


# -- matching -----------------------------------------------------------------


class SymbolNotInAlphabet(ParemError, ValueError):
    def __init__(self, symbol: str, position: int | None = None):
        where = "" if position is None else f" at offset {position}"
        super().__init__(f"symbol {symbol!r}{where} is not in the DFA alphabet")
        self.symbol = symbol
        self.position = position


class MissingRoute(ParemError, RuntimeError):
    """A left-hand route ended in a state the right-hand segment never explored."""


# -- benchmarking -------------------------------------------------------------


class PlantOverflow(ParemError, ValueError):
    pass


class ResultMismatch(ParemError, RuntimeError):
    pass
