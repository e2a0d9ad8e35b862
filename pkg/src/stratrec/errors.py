"""Exception hierarchy shared across the package.

Every error carries a human-readable message naming the offending field or
entity; the CLI and the HTTP service map these classes onto exit codes and
status codes respectively.
"""


class StratRecError(Exception):
    """Base class for all package errors."""


class ValidationError(StratRecError):
    """A value is outside its documented range or a record is malformed."""


class ConfigurationError(StratRecError):
    """A required model or configuration entry is missing."""


class CardinalityError(StratRecError):
    """A cardinality constraint k exceeds what the catalog can provide."""


class SizeCapError(StratRecError):
    """An exhaustive oracle was asked to exceed its safety cap."""
