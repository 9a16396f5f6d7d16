"""Exception types raised across the simulator.

Every error derives from :class:`DChannelError` so callers (the CLI in
particular) can separate usage mistakes from bad data with one ``except``.
"""


class DChannelError(Exception):
    """Base class for all simulator errors."""

    exit_code = 2


class ParameterError(DChannelError, ValueError):
    """A distribution or configuration parameter is out of range."""


class FitError(DChannelError, ValueError):
    """Maximum-likelihood fitting could not produce a usable estimate."""


class DomainError(DChannelError, ValueError):
    """An argument lies outside the support of the operation."""


class UsageError(DChannelError, ValueError):
    """The caller asked for something that cannot be done with these inputs."""

    exit_code = 1


class UndefinedCorrelationError(DChannelError, ValueError):
    """Pearson correlation requested for zero-variance data."""


class EmptyChannelError(DChannelError, ValueError):
    """A channel response was requested for a path set with no paths."""


class CatalogLookupError(DChannelError, LookupError):
    """Unknown location or scenario key."""


class NotAvailableError(DChannelError, LookupError):
    """The requested value does not exist (missing table row, no paths)."""


class CatalogParseError(DChannelError, ValueError):
    """The catalog document violates the schema.

    ``path`` is the dotted location of the first offending field.
    """

    def __init__(self, message, path=''):
        self.path = path
        if path:
            message = '%s: %s' % (path, message)
        super(CatalogParseError, self).__init__(message)


class IngestError(DChannelError, ValueError):
    """A measurement CSV row could not be read. ``line`` is 1-based."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = 'line %d: %s' % (line, message)
        super(IngestError, self).__init__(message)
