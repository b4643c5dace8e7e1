"""Exception hierarchy shared across the package.

The CLI maps ValidationError (and subclasses) to exit code 2 and any other
AtreeError to exit code 3.
"""


class AtreeError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(AtreeError):
    """Invalid argument, configuration, or input data."""


class ParseError(ValidationError):
    """Malformed input file; message names the offending line."""


class SchemaError(ValidationError):
    """Model document is malformed or has an unsupported version."""
