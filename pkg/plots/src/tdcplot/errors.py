"""Error types raised on purpose by the plotting tool."""


class TdcPlotError(Exception):
    """Base class for every failure this package reports by name."""


class MalformedCsv(TdcPlotError):
    """A curve file does not follow the harness CSV format.

    The message names the offending file and line.
    """


class InvalidSpec(TdcPlotError):
    """A figure-spec or envelope value is missing, unknown, or out of range."""
