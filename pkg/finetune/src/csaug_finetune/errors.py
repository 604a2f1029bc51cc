"""Exception types for the fine-tuning harness.

Every error derives from FinetuneError so callers can catch the family
with one clause.  CLI exit codes: configuration errors map to 64,
data-format and resource errors to 1.
"""


class FinetuneError(Exception):
    """Base class for all harness errors."""


class ConfigurationError(FinetuneError):
    """A config value is out of range or inconsistent (caught before training)."""


class DataFormatError(FinetuneError):
    """A dataset file violates the multiatis-tsv format."""


class ResourceError(FinetuneError):
    """A required resource (model files, dataset file, output dir) is unusable."""
