"""Error taxonomy shared across the package.

All three are ValueError subclasses so callers that do not care about the
distinction can catch the base class.
"""


class ConfigurationError(ValueError):
    """A size, range, width, or option is outside what the library supports."""


class ValidationError(ValueError):
    """Supplied data fails a mathematical check (non-unitary matrix, bad norm,
    duplicate candidates, ancilla left dirty)."""


class PreconditionError(ValueError):
    """An algorithm was invoked on a problem that violates its premise."""
