"""Exception hierarchy shared across the package."""


class QdtError(Exception):
    """Base class for all errors raised by this package."""


class QdtParseError(QdtError):
    def __init__(self, message, token_index=None):
        super().__init__(message)
        self.token_index = token_index


class UnbalancedBrackets(QdtParseError):
    pass


class EmptyDescription(QdtParseError):
    pass


class StrayPlaceholder(QdtParseError):
    pass


class NoSeparators(QdtError):
    pass


class Atomic(QdtError):
    """Raised when a two-part split is requested for an undecomposed question."""


class InvalidMerge(QdtError):
    def __init__(self, message, issues=()):
        super().__init__(message)
        self.issues = list(issues)


class ScorerFailure(QdtError):
    pass


class InvalidInput(QdtError):
    pass


class LengthMismatch(QdtError):
    pass


class SizeLimit(QdtError):
    pass


class ValidationFailure(QdtError):
    pass


class SExprSyntaxError(QdtError):
    def __init__(self, message, position=None):
        super().__init__(message if position is None else f"{message} (at offset {position})")
        self.position = position


class ArityError(QdtError):
    pass


class UnknownEntity(QdtError):
    pass


class AmbiguousLabel(QdtError):
    def __init__(self, label, ids):
        super().__init__(f"label {label!r} maps to {len(ids)} ids: {', '.join(ids)}")
        self.label = label
        self.ids = list(ids)


class UnknownElement(QdtError):
    pass
