"""Shared exception types."""


class PipelineError(Exception):
    """Base class for all errors raised by this package."""


class InputFormatError(PipelineError):
    """A data file does not match its declared schema."""


class ConfigError(PipelineError):
    """An option value is outside its legal range."""
