"""Language-family presets used to constrain the code-switching language pool."""

from __future__ import annotations

from .errors import UnknownFamily

# Family name -> member language codes, in presentation order.
FAMILIES: dict[str, tuple[str, ...]] = {
    "afro-asiatic": ("ar", "am", "he", "so"),
    "germanic": ("de", "nl", "da", "sv", "no"),
    "indo-aryan": ("hi", "bn", "mr", "ne", "gu", "pa"),
    "romance": ("es", "pt", "fr", "it", "ro"),
    "sino-tibetan-japonic": ("zh-cn", "ja", "ko"),
    "turkic": ("tr", "az", "ug", "kk"),
}

# Languages written without spaces between words; translated phrases in these
# languages are tokenized by script runs instead of whitespace.
SCRIPTIO_CONTINUA: frozenset[str] = frozenset({"zh-cn", "ja"})


def family_members(name: str) -> set[str]:
    """Member language codes of a family.

    When the evaluation target belongs to the family, the caller is expected
    to put it in the excluded-language set; this function never filters.
    """
    try:
        return set(FAMILIES[name])
    except KeyError:
        raise UnknownFamily(
            f"unknown family {name!r}, expected one of {sorted(FAMILIES)}"
        ) from None


def family_rows() -> list[tuple[str, tuple[str, ...]]]:
    """(name, members) pairs in presentation order, for CLI/service output."""
    return list(FAMILIES.items())
