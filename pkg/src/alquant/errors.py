"""Exception hierarchy shared by every layer of the toolkit."""


class AlquantError(Exception):
    """Base class for all errors raised by alquant."""


class ManagerMismatch(AlquantError, ValueError):
    pass


class EmptyFunction(AlquantError, ValueError):
    """Raised when minimal models of the constant false function are requested."""


class UnknownState(AlquantError, KeyError):
    pass


class UnknownVariable(AlquantError, KeyError):
    pass


class AlphabetMismatch(AlquantError, ValueError):
    pass


class NotStatePositive(AlquantError, ValueError):
    """A transition function mentions a state variable negatively."""


class ParseError(AlquantError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class NonPrenexError(ParseError):
    pass


class UnsupportedFragment(AlquantError):
    def __init__(self, message, span=None):
        self.span = span
        if span is not None:
            message = f"{message} at line {span[0]}, column {span[1]}"
        super().__init__(message)


class ResourceLimit(AlquantError):
    """Base for configurable size caps."""

    def __init__(self, what, limit):
        self.limit = limit
        super().__init__(f"{what} exceeded the limit of {limit}")


class SubsetBlowupLimit(ResourceLimit):
    def __init__(self, limit):
        super().__init__("subset construction", limit)


class MacroBlowupLimit(ResourceLimit):
    def __init__(self, limit):
        super().__init__("macro-state construction", limit)


class BranchBlowupLimit(ResourceLimit):
    def __init__(self, limit):
        super().__init__("unfolding enumeration", limit)
