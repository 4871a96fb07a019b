import pytest
from hypothesis import given, strategies as st

from elmo2eds.elmo import parse_elmo, validate_elmo
from elmo2eds.errors import InvalidGenderCode, UnknownStandard
from elmo2eds.standards import (
    canonicalize,
    lookup,
    map_gender,
    map_grading_scheme,
    validate_eqf_level,
)

from conftest import convertible_corpus_paths


def test_isced_mathematics(registries):
    assert lookup(registries, "ISCED_F_2013", "541") == "Mathematics"
    assert lookup(registries, "ISCED_F_2013", "0541") == "Mathematics"


def test_country_positive_negative(registries):
    assert lookup(registries, "ISO3166_1_ALPHA2", "SE") == "Sweden"
    assert lookup(registries, "ISO3166_1_ALPHA2", "se") == "Sweden"
    assert lookup(registries, "ISO3166_1_ALPHA2", "ZZ") is None


def test_language_lookup(registries):
    assert lookup(registries, "ISO639_1", "nb") == "Norwegian Bokmål"
    assert lookup(registries, "ISO639_1", "EN") == "English"
    assert lookup(registries, "ISO639_1", "xx") is None


def test_unknown_standard(registries):
    with pytest.raises(UnknownStandard):
        lookup(registries, "ISO9000", "se")


@pytest.mark.parametrize("level,ok", [(1, True), (4, True), (8, True), (0, False), (9, False), (-3, False)])
def test_eqf_bounds(level, ok):
    assert validate_eqf_level(level) is ok


def test_grading_scheme_ects_passthrough():
    assert map_grading_scheme("ECTS", "B") == ("ECTS", "B")
    assert map_grading_scheme("ECTS", "FX") == ("ECTS", "FX")
    assert map_grading_scheme("ects", "A") == ("ECTS", "A")


def test_grading_scheme_local_prefix():
    assert map_grading_scheme("de-1-6", "1.3") == ("local:de-1-6", "1.3")


@pytest.mark.parametrize("code,word", [(0, "unknown"), (1, "male"), (2, "female"), (9, "not applicable")])
def test_gender_words(code, word):
    assert map_gender(code) == word


def test_gender_rejects_unassigned_codes():
    with pytest.raises(InvalidGenderCode):
        map_gender(5)


def test_registry_immutable(registries):
    reg = registries.registry("ECTS")
    with pytest.raises(TypeError):
        reg.entries["Z"] = "bogus"
    assert lookup(registries, "ECTS", "B") == lookup(registries, "ECTS", "B")


@given(code=st.text(min_size=1, max_size=6))
def test_canonicalization_idempotent(code):
    for standard in ("ISO3166_1_ALPHA2", "ISO639_1", "ISCED_F_2013", "ECTS", "EQF"):
        once = canonicalize(standard, code)
        assert canonicalize(standard, once) == once


@pytest.mark.parametrize("path", convertible_corpus_paths(), ids=lambda p: p.stem)
def test_corpus_codes_resolve_or_flag(path, registries):
    """Every code any fixture document references either resolves in its
    registry or is flagged by validate_elmo; there is no silent third state."""
    doc = parse_elmo(path.read_bytes())
    findings = {(f.path, f.code) for f in validate_elmo(doc, registries).findings}

    def check(code, standard, finding_path, finding_code):
        if code is None:
            return
        assert lookup(registries, standard, code) is not None \
            or (finding_path, finding_code) in findings

    check(doc.learner.citizenship, "ISO3166_1_ALPHA2", "learner.citizenship", "unknown-country")
    check(doc.issuer.country, "ISO3166_1_ALPHA2", "issuer.country", "unknown-country")

    def walk(node, prefix):
        check(node.isced_code, "ISCED_F_2013", f"{prefix}.iscedCode", "unknown-isced-code")
        check(node.language_of_instruction, "ISO639_1",
              f"{prefix}.languageOfInstruction", "unknown-language-code")
        for j, kid in enumerate(node.children):
            walk(kid, f"{prefix}.hasPart[{j}]")

    for i, report in enumerate(doc.reports):
        walk(report, f"reports[{i}]")
