"""Exception types shared across the package.

Every error raised by csaug derives from CsaugError so callers can catch
the whole family with one clause.  CLI exit codes: data/validation errors
map to 1, provider failures to 2, usage errors to 64.
"""


class CsaugError(Exception):
    """Base class for all csaug errors."""


class MalformedRecord(CsaugError):
    """A dataset record violates the file format (column count, length mismatch)."""


class IllegalBIOTransition(CsaugError):
    """An I-<type> label is not preceded by B-<type>/I-<type> of the same type."""


class UnknownFormat(CsaugError):
    """Requested dataset format is not one of the supported names."""


class IoFailure(CsaugError):
    """Reading or writing a dataset file failed at the OS level."""


class NonContiguousChunks(CsaugError):
    """Chunk list passed to reassemble() does not tile the utterance."""


class EmptyTranslation(CsaugError):
    """A provider returned an empty translation for a non-empty phrase."""


class UnsupportedLanguage(CsaugError):
    """Provider cannot translate into the requested language."""


class ProviderUnavailable(CsaugError):
    """Provider could not be reached (network failure / HTTP >= 500 after retries)."""


class RateLimited(CsaugError):
    """Provider answered 429; surfaced to the caller, never silently absorbed."""


class ConfigurationError(CsaugError):
    """Invalid configuration (empty language set, bad provider string, ...)."""


class DuplicateLexiconEntry(ConfigurationError):
    """A lexicon file maps the same source phrase twice."""


class UnknownFamily(CsaugError):
    """Requested language family is not in the registry."""


class AugmentationError(CsaugError):
    """One or more utterances failed to augment; carries the per-utterance details."""

    def __init__(self, failures: list[tuple[str, str]], provider_failure: bool = False):
        self.failures = failures
        self.provider_failure = provider_failure
        lines = "; ".join(f"{uid}: {msg}" for uid, msg in failures[:5])
        more = "" if len(failures) <= 5 else f" (+{len(failures) - 5} more)"
        super().__init__(f"{len(failures)} utterance(s) failed: {lines}{more}")


class ModelFormatError(CsaugError):
    """A model file is not in the expected binary format (or is truncated)."""


class EmptyBatch(CsaugError):
    """A training/loss operation received no data."""


class UnknownLabelInventory(CsaugError):
    """Input labels are not covered by the model's label inventories."""


class DivergenceDetected(CsaugError):
    """Training loss became non-finite."""
