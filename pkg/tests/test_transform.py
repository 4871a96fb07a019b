import json

import pytest

from elmo2eds.eds import (
    HOLDER_PLACEHOLDER_DID,
    ISSUER_PLACEHOLDER_DID,
    JWS_PLACEHOLDER,
    Did,
    serialize_jsonld,
)
from elmo2eds.elmo import DocumentType, leaf_claims, parse_elmo
from elmo2eds.errors import ConfigError, InvariantViolation, UnmappableClaim
from elmo2eds.transform import (
    ClaimMapping,
    ConversionMode,
    ConversionOptions,
    apply_overrides,
    convert,
    insert_placeholders,
    select_template,
)

from conftest import convertible_corpus_paths

MAIN_STEMS = ("transcript_sweden", "transcript_norway", "certificate_germany", "certificate_finland")


def test_select_template_deterministic():
    cert = select_template(DocumentType.UPPER_SECONDARY_SCHOOL_CERTIFICATE)
    trans = select_template(DocumentType.TRANSCRIPT_OF_RECORDS)
    assert cert is select_template(DocumentType.UPPER_SECONDARY_SCHOOL_CERTIFICATE)
    assert trans is select_template(DocumentType.TRANSCRIPT_OF_RECORDS)
    assert not cert.recurse_achievements
    assert trans.recurse_achievements
    assert cert.claim_mappings == trans.claim_mappings


@pytest.mark.parametrize("stem", MAIN_STEMS)
def test_golden_conversion(stem, elmo_bytes, golden_bytes, registries):
    report = convert(parse_elmo(elmo_bytes(stem)), ConversionOptions(), registries)
    assert serialize_jsonld(report.credential) == golden_bytes(f"{stem}.jsonld")


def test_placeholder_contract(elmo_bytes, registries):
    cred = convert(parse_elmo(elmo_bytes("transcript_sweden")), ConversionOptions(), registries).credential
    assert str(cred.issuer) == ISSUER_PLACEHOLDER_DID
    assert str(cred.credential_subject.id) == HOLDER_PLACEHOLDER_DID
    assert cred.proof.jws == JWS_PLACEHOLDER
    assert cred.credential_schema[0]
    assert len(cred.credential_subject.achievements[0].sub_achievements) == 3


def test_issuer_level_eqf_carried(elmo_bytes, registries):
    report = convert(parse_elmo(elmo_bytes("certificate_germany")), ConversionOptions(), registries)
    assert ("issuer.levelEQF", "4") in report.carried_extensions
    assert report.credential.extension["issuer.levelEQF"] == "4"


def test_holder_did_present_without_learner_identifiers(elmo_bytes, registries):
    doc = parse_elmo(elmo_bytes("minimal"))
    assert doc.learner.identifiers == ()
    cred = convert(doc, ConversionOptions(), registries).credential
    assert str(cred.credential_subject.id) == HOLDER_PLACEHOLDER_DID


@pytest.mark.parametrize("path", convertible_corpus_paths(), ids=lambda p: p.stem)
def test_losslessness_every_leaf_mapped_or_carried(path, registries):
    doc = parse_elmo(path.read_bytes())
    report = convert(doc, ConversionOptions(), registries)
    mapped_sources = {src for src, _, _ in report.mapped_claims}
    carried_sources = {src for src, _ in report.carried_extensions}
    for claim_path, _ in leaf_claims(doc):
        assert claim_path in mapped_sources or claim_path in carried_sources, claim_path


def test_xml_signature_bytes_never_reach_output(elmo_bytes, registries):
    doc = parse_elmo(elmo_bytes("transcript_sweden_signed"))
    sig = doc.xml_signature
    assert sig is not None
    out = serialize_jsonld(convert(doc, ConversionOptions(), registries).credential)
    import base64
    for blob in (sig.digest_value, sig.signature_value, sig.certificate):
        assert base64.b64encode(blob) not in out
        assert blob not in out


def test_convert_deterministic(elmo_bytes, registries):
    doc = parse_elmo(elmo_bytes("transcript_norway"))
    first = convert(doc, ConversionOptions(), registries)
    second = convert(doc, ConversionOptions(), registries)
    assert serialize_jsonld(first.credential) == serialize_jsonld(second.credential)
    assert first.carried_extensions == second.carried_extensions


def _arity(node):
    return [len(node.children) if hasattr(node, "children") else len(node.sub_achievements)] + [
        _arity(kid) for kid in (node.children if hasattr(node, "children") else node.sub_achievements)]


@pytest.mark.parametrize("stem", ("transcript_sweden", "transcript_norway"))
def test_transcript_structure_preserved(stem, elmo_bytes, registries):
    doc = parse_elmo(elmo_bytes(stem))
    cred = convert(doc, ConversionOptions(), registries).credential
    assert len(doc.reports) == len(cred.credential_subject.achievements)
    for los, ach in zip(doc.reports, cred.credential_subject.achievements):
        assert _arity(los) == _arity(ach)


def test_insert_placeholders_idempotent(elmo_bytes, registries):
    cred = convert(parse_elmo(elmo_bytes("certificate_finland")), ConversionOptions(), registries).credential
    opts = ConversionOptions()
    once = insert_placeholders(cred, opts)
    assert insert_placeholders(once, opts) == once
    assert once == cred  # convert already applied them


def test_insert_placeholders_fills_empty_proof(elmo_bytes, registries):
    from dataclasses import replace
    cred = convert(parse_elmo(elmo_bytes("certificate_finland")), ConversionOptions(), registries).credential
    blank = replace(cred, proof=replace(cred.proof, jws=""))
    assert insert_placeholders(blank, ConversionOptions()).proof.jws == JWS_PLACEHOLDER


def test_signing_mode_substitutes_dids(elmo_bytes, registries):
    d1 = Did.parse("did:ebsi:zIssuerKey111")
    d2 = Did.parse("did:ebsi:zHolderKey222")
    opts = ConversionOptions(mode=ConversionMode.SIGNING, issuer_did=d1, holder_did=d2)
    cred = convert(parse_elmo(elmo_bytes("transcript_sweden")), opts, registries).credential
    assert cred.issuer == d1
    assert cred.credential_subject.id == d2
    assert cred.proof.jws == ""  # pending the signing step


def test_signing_mode_requires_both_dids():
    with pytest.raises(InvariantViolation):
        ConversionOptions(mode=ConversionMode.SIGNING, issuer_did=Did.parse("did:ebsi:zOnly"))


def test_explicit_type_override_uses_certificate_template(elmo_bytes, registries):
    opts = ConversionOptions(explicit_type_override=DocumentType.UPPER_SECONDARY_SCHOOL_CERTIFICATE)
    report = convert(parse_elmo(elmo_bytes("transcript_sweden")), opts, registries)
    cred = report.credential
    assert cred.types[-1] == "UpperSecondarySchoolCertificate"
    top = cred.credential_subject.achievements[0]
    assert top.sub_achievements == ()  # course claims went to the extension instead
    assert cred.extension["reports[0].hasPart[0].title"] == "Linear Algebra II"
    assert cred.extension["reports[0].hasPart[0].result.resultLabel"] == "B"


def test_mapping_override_demotes_gender_to_extension(elmo_bytes, registries):
    override = (ClaimMapping("learner.gender", "extension"),)
    opts = ConversionOptions(mapping_overrides=override)
    cred = convert(parse_elmo(elmo_bytes("transcript_sweden")), opts, registries).credential
    assert cred.credential_subject.gender is None
    assert cred.extension["learner.gender"] == "2"


def test_mapping_override_rejects_unknown_slots():
    template = select_template(DocumentType.TRANSCRIPT_OF_RECORDS)
    with pytest.raises(ConfigError):
        apply_overrides(template, (ClaimMapping("learner.gender", "credentialSubject.sex"),))
    with pytest.raises(ConfigError):
        apply_overrides(template, (ClaimMapping("title", "heading"),))


def test_unmappable_claim_on_missing_title(elmo_bytes, registries):
    xml = elmo_bytes("certificate_finland").replace(
        b"<title xml:lang=\"fi\">Ylioppilastutkinto</title>", b"")
    with pytest.raises(UnmappableClaim):
        convert(parse_elmo(xml), ConversionOptions(), registries)


def test_warnings_for_non_ects_scheme(elmo_bytes, registries):
    report = convert(parse_elmo(elmo_bytes("certificate_germany")), ConversionOptions(), registries)
    assert any("de-1-6" in w for w in report.warnings)
    ach = report.credential.credential_subject.achievements[0]
    assert ach.grading_scheme == "local:de-1-6"
    assert ach.grade == "1.8"


def test_language_display_name_with_original_recorded(elmo_bytes, registries):
    cred = convert(parse_elmo(elmo_bytes("transcript_norway")), ConversionOptions(), registries).credential
    top = cred.credential_subject.achievements[0]
    assert top.language_of_instruction == "Norwegian Bokmål"
    assert cred.extension["reports[0].languageOfInstruction"] == "nb"


def test_nqf_level_is_opaque_passthrough(elmo_bytes, registries):
    xml = elmo_bytes("transcript_sweden").replace(
        b'<level type="eqf">6</level>', b'<level type="nqf">SeQF 6</level>')
    cred = convert(parse_elmo(xml), ConversionOptions(), registries).credential
    assert cred.credential_subject.achievements[0].eqf_level is None
    assert cred.extension["reports[0].level.nqf"] == "SeQF 6"


def test_generated_date_retained_next_to_issuance(elmo_bytes, registries):
    cred = convert(parse_elmo(elmo_bytes("transcript_sweden")), ConversionOptions(), registries).credential
    assert cred.issuance_date == "2022-06-03T08:30:00Z"
    assert cred.extension["generatedDate"] == "2022-06-03T10:30:00+02:00"
