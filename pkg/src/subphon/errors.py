"""Exception types shared across the toolkit."""


class SubphonError(Exception):
    """Base class for every error raised by subphon."""


class ParseError(SubphonError, ValueError):
    """An input file does not follow its format."""


class ValidationError(SubphonError, ValueError):
    """Input parsed but violates a structural invariant."""


class UnknownPhoneError(SubphonError, LookupError):
    """A phone label is not part of the relevant inventory."""

    def __init__(self, label, where="inventory"):
        self.label = label
        super().__init__(f"unknown phone {label!r} (not in {where})")


class UndefinedRateError(SubphonError, ZeroDivisionError):
    """A rate or distance has an empty denominator."""
