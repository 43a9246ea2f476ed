"""Exception hierarchy shared across the toolkit.

Two top-level families matter for the CLI exit codes: ``InputError``
(malformed models, bad orderings, unsupported metric/model combinations)
and ``AnalysisError`` (an analysis started but could not finish: caps
exceeded, divergent integrals, undefined measures).
"""


class FtaError(Exception):
    """Base class for all toolkit errors."""


class InputError(FtaError):
    """The request or the model it refers to is invalid."""


class AnalysisError(FtaError):
    """A well-formed analysis could not be completed."""


class SolutionCapExceeded(AnalysisError):
    """Solution enumeration would produce more sets than the configured cap."""


class StateCapExceeded(AnalysisError):
    """Markov chain exploration exceeded the configured state cap."""


class UndefinedMeasureError(AnalysisError):
    """An importance measure is undefined (division by zero) for this model."""
