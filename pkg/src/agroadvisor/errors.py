"""Exception hierarchy shared across the engine."""


class AdvisorError(Exception):
    """Base class for all domain errors raised by this package."""


class InvalidRule(AdvisorError):
    """A correction rule's pattern or guard does not compile."""


class EmptyDocument(AdvisorError):
    """A document has no tokens after normalization."""


class ParseError(AdvisorError):
    """Malformed serialized input (frontmatter, manifest, JSONL).

    Carries the 1-based line number when one is known.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyInput(AdvisorError):
    """Text is empty after trimming."""


class ProviderUnavailable(AdvisorError):
    """Embedding provider unreachable; retry_after is in seconds."""

    def __init__(self, message: str, retry_after: float = 1.0):
        super().__init__(message)
        self.retry_after = retry_after


class DimensionMismatch(AdvisorError):
    """Vector dimensions disagree."""


class DuplicateId(AdvisorError):
    """Chunk id already present in the index."""


class EmptyIndex(AdvisorError):
    """Search against an index with no entries."""


class EmptyQuery(AdvisorError):
    """Query text is empty."""


class ContextBudgetExhausted(AdvisorError):
    """Not even the top-ranked context block fits the prompt budget."""


class BackendUnavailable(AdvisorError):
    """Chat backend unreachable; retry_after is in seconds."""

    def __init__(self, message: str, retry_after: float = 1.0):
        super().__init__(message)
        self.retry_after = retry_after


class BackendRefusal(AdvisorError):
    """Chat backend answered with a non-200 semantic error."""

    def __init__(self, message: str, status_code: int | None = None):
        super().__init__(message)
        self.status_code = status_code


class TimeoutExceeded(AdvisorError):
    """Chat backend did not answer within the request timeout."""
