"""Exception hierarchy.

Every error raised on purpose by the library derives from
:class:`GZError`; the CLI maps these to exit code 1 and uses
:attr:`GZError.kind` in its error payload.
"""


class GZError(Exception):
    kind = "domain"


class ModeError(GZError, TypeError):
    """Exact and float values mixed, or a float-only path hit in exact mode."""

    kind = "mode"


class SchemaError(GZError, ValueError):
    kind = "schema"


class NotSplittingError(GZError, ValueError):
    """An exact polynomial has roots outside the Gaussian rationals."""

    kind = "not-splitting"


class NotRegularError(GZError, ValueError):
    kind = "not-regular"


class SpectrumMismatchError(GZError, ValueError):
    kind = "spectrum-mismatch"


class SingularSystemError(GZError, ArithmeticError):
    kind = "singular-system"


class ToleranceError(GZError, ArithmeticError):
    """Independent float-mode characterizations disagree."""

    kind = "tolerance"


class NotStronglyRegularError(GZError, ValueError):
    kind = "not-strongly-regular"


class ClassificationError(GZError, ValueError):
    kind = "classification"
