"""Exceptions shared across modules."""


class ValkeyError(Exception):
    """Base class for recoverable, reportable failures."""


class BudgetExhausted(ValkeyError):
    """A bounded search or a precision cap ran out before an answer was certified."""


class Indeterminate(ValkeyError):
    """Neither the fixed nor the increasing pattern was established in the window."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class Unsupported(ValkeyError):
    pass


class DegenerateConstant(ValkeyError):
    pass


class NonSimpleRoot(ValkeyError):
    pass


class LimitInK(ValkeyError):
    """The sequence has a pseudo-limit in the base field."""

    def __init__(self, message, limit=None):
        super().__init__(message)
        self.limit = limit


class NotFixed(ValkeyError):
    pass
