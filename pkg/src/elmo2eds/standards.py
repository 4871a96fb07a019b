"""Immutable code registries for the external standards used by ELMO and EDS.

Each registry is loaded from a checked-in TSV fixture
(``fixtures/standards/<standard_id>.tsv``, one ``code<TAB>display-name``
record per line) and is never mutated after loading.  Covered standards:

* ``ISO3166_1_ALPHA2`` -- country codes (uppercase alpha-2)
* ``ISO_IEC_5218``     -- numeric gender codes {0, 1, 2, 9}
* ``ISCED_F_2013``     -- fields of education and training
* ``ISO639_1``         -- language codes (lowercase alpha-2)
* ``EQF``              -- European Qualifications Framework levels 1..8
* ``ECTS``             -- ECTS grade labels A..F, FX
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Mapping, Optional

from .errors import InvalidGenderCode, UnknownStandard

STANDARD_IDS = (
    "ISO3166_1_ALPHA2",
    "ISO_IEC_5218",
    "ISCED_F_2013",
    "ISO639_1",
    "EQF",
    "ECTS",
)

# Word forms emitted into the credential subject for ISO/IEC 5218 codes.
# The registry TSV keeps the published ISO display names; the credential
# output uses these lowercase words.
GENDER_WORDS = {0: "unknown", 1: "male", 2: "female", 9: "not applicable"}

ECTS_GRADES = frozenset({"A", "B", "C", "D", "E", "F", "FX"})

EQF_MIN, EQF_MAX = 1, 8

# Grading schemes outside ECTS pass through verbatim under this prefix;
# no grade conversion between national scales is attempted.
LOCAL_SCHEME_PREFIX = "local:"

DEFAULT_STANDARDS_DIR = Path(__file__).resolve().parents[2] / "fixtures" / "standards"


@dataclass(frozen=True)
class CodeRegistry:
    """One external standard's code list, immutable after construction."""

    standard_id: str
    entries: Mapping[str, str]
    source_fixture: str

    def __post_init__(self):
        if not self.entries:
            raise ValueError(f"registry {self.standard_id} has no entries")
        object.__setattr__(self, "entries", MappingProxyType(dict(self.entries)))


@dataclass(frozen=True)
class StandardsRegistries:
    """Handle bundling all loaded registries."""

    registries: Mapping[str, CodeRegistry] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "registries", MappingProxyType(dict(self.registries)))

    def registry(self, standard: str) -> CodeRegistry:
        try:
            return self.registries[standard]
        except KeyError:
            raise UnknownStandard(f"no registry for standard {standard!r}") from None


def load_registry(standard: str, fixture_dir: Path = DEFAULT_STANDARDS_DIR) -> CodeRegistry:
    path = fixture_dir / f"{standard}.tsv"
    entries: dict[str, str] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        code, sep, name = line.partition("\t")
        if not sep:
            raise ValueError(f"{path}:{lineno}: expected <code>\\t<display-name>")
        if code in entries:
            raise ValueError(f"{path}:{lineno}: duplicate code {code!r}")
        entries[code] = name
    return CodeRegistry(standard_id=standard, entries=entries, source_fixture=str(path))


def load_registries(fixture_dir: Path = DEFAULT_STANDARDS_DIR) -> StandardsRegistries:
    return StandardsRegistries({s: load_registry(s, fixture_dir) for s in STANDARD_IDS})


def canonicalize(standard: str, code: str) -> str:
    """Normalize a code before lookup: uppercase countries and ECTS grades,
    lowercase languages, zero-pad 3-digit ISCED detailed-field codes."""
    code = code.strip()
    if standard == "ISO3166_1_ALPHA2":
        return code.upper()
    if standard in ("ISO639_1",):
        return code.lower()
    if standard == "ECTS":
        return code.upper()
    if standard == "ISCED_F_2013" and len(code) == 3 and code.isdigit() and not code.startswith("0"):
        # ISCED-F detailed fields are 4 digits with a leading zero; tolerate
        # the bare 3-digit spelling (e.g. 541 for 0541).
        return "0" + code
    return code


def lookup(registries: StandardsRegistries, standard: str, code: str) -> Optional[str]:
    """Display name for ``code`` in ``standard``, or None if unassigned."""
    reg = registries.registry(standard)
    canon = canonicalize(standard, code)
    hit = reg.entries.get(canon)
    if hit is None and standard == "ISCED_F_2013" and canon != code:
        hit = reg.entries.get(code)
    return hit


def validate_eqf_level(level: int) -> bool:
    return EQF_MIN <= level <= EQF_MAX


def map_grading_scheme(elmo_scheme: str, grade: str) -> tuple[str, str]:
    """ECTS grades pass through unchanged; any other scheme is passed
    through verbatim with a ``local:`` scheme prefix (the caller records a
    mapping warning)."""
    if elmo_scheme.strip().upper() == "ECTS":
        return "ECTS", grade
    return LOCAL_SCHEME_PREFIX + elmo_scheme, grade


def map_gender(code: int) -> str:
    try:
        return GENDER_WORDS[code]
    except KeyError:
        raise InvalidGenderCode(f"gender code {code!r} is not one of {sorted(GENDER_WORDS)}") from None
