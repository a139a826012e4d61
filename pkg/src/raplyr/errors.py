"""Exception types shared across the toolkit."""

from __future__ import annotations


class RaplyrError(Exception):
    """Base class for all raplyr errors."""


class ParseError(RaplyrError):
    """A resource file could not be parsed. Carries a 1-based line number when known."""

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class SeverityOutOfRange(ParseError):
    """Severity rating outside the [1, 3] scale."""


class EmptyInput(RaplyrError):
    """An operation that requires non-empty input received none."""


class EmptySong(EmptyInput):
    """Song has no non-empty verse lines."""


class EmptyCorpus(EmptyInput):
    """No usable songs or tokens to work with."""


class EmptyQuery(EmptyInput):
    """Completion query contains no non-empty context line."""


class EmptyTestSet(EmptyInput):
    """Evaluation requires at least one test song."""


class TooShort(RaplyrError):
    """Test instance has too few lines to split into input and reference parts."""


class NegativeInput(RaplyrError):
    """Numeric argument outside its allowed sign range."""


class AuthError(RaplyrError):
    """API rejected the access token (401/403)."""


class RateLimited(RaplyrError):
    """API asked us to slow down (429)."""


class NetworkError(RaplyrError):
    """Request still failing after retries."""


class PhonemizerProcessError(RaplyrError):
    """External phonemizer subprocess failed or violated the line protocol."""


class ProcessError(RaplyrError):
    """External generator subprocess failed."""


class ProcessTimeout(ProcessError):
    """External generator subprocess exceeded its time budget."""
