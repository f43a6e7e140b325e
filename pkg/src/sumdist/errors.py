"""Exception hierarchy.

Every error raised by the library derives from :class:`SumdistError`, and
most also derive from :class:`ValueError` so that generic callers can catch
bad input without importing this module.
"""


class SumdistError(Exception):
    """Base class for all library errors."""


class EmptyInput(SumdistError, ValueError):
    pass


class InvalidValue(SumdistError, ValueError):
    """A support value that cannot be placed on a decimal lattice."""

    def __init__(self, value, reason, index=None):
        self.value = value
        self.index = index
        super().__init__(f"invalid value {value!r}: {reason}")


class NegativeProbability(SumdistError, ValueError):
    def __init__(self, value, index=None):
        self.value = value
        self.index = index
        super().__init__(f"negative probability for value {value}")


class DuplicateCategory(SumdistError, ValueError):
    def __init__(self, value, index=None):
        self.value = value
        self.index = index
        super().__init__(f"duplicate category {value}")


class NotNormalized(SumdistError, ValueError):
    def __init__(self, total):
        self.total = total
        super().__init__(f"probabilities sum to {total!r}, not 1")


class ZeroScale(SumdistError, ValueError):
    pass


class IncompatibleQuanta(SumdistError, ValueError):
    pass


class FoldCountZero(SumdistError, ValueError):
    pass


class WindowTooLarge(SumdistError, ValueError):
    def __init__(self, window, budget):
        self.window = window
        self.budget = budget
        super().__init__(f"dense window of {window} points exceeds budget {budget}")


class NonPositiveVariance(SumdistError, ValueError):
    pass


class DegenerateVariance(SumdistError, ValueError):
    pass


class NonPositiveWidth(SumdistError, ValueError):
    pass


class EmptyDataset(SumdistError, ValueError):
    pass


class NegativeCompensation(SumdistError, ValueError):
    pass


class RecordOutOfSupport(SumdistError, ValueError):
    def __init__(self, item_id, reason=""):
        self.item_id = item_id
        super().__init__(f"record {item_id!r} out of support" + (f": {reason}" if reason else ""))


class UnsupportedLevel(SumdistError, ValueError):
    def __init__(self, level):
        self.level = level
        super().__init__(f"level {level} has zero probability but a positive count")


class ParseError(SumdistError, ValueError):
    def __init__(self, line, reason):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")
