import hashlib
import xml.etree.ElementTree as ET

import pytest

from elmo2eds.elmo import (
    DocumentType,
    detect_document_type,
    leaf_claims,
    parse_elmo,
    validate_elmo,
)
from elmo2eds.errors import (
    MalformedXml,
    OversizeInput,
    SchemaViolation,
    UnclassifiableDocument,
)

from conftest import ELMO_DIR, corpus_paths


def _edit(xml: bytes, old: str, new: str) -> bytes:
    assert old.encode() in xml
    return xml.replace(old.encode(), new.encode())


def test_parse_transcript_sweden(elmo_bytes):
    doc = parse_elmo(elmo_bytes("transcript_sweden"))
    assert doc.learner.citizenship == "SE"
    assert doc.learner.given_name == "Anna Maria"
    assert doc.learner.gender == 2
    assert doc.issuer.country == "SE"
    assert doc.issuer.title == "Uppsala University"
    assert [s for s, _ in doc.issuer.identifiers] == ["schac", "erasmus"]
    assert len(doc.reports) == 1
    top = doc.reports[0]
    assert top.los_type == "DegreeProgramme"
    assert top.eqf_level == 6
    assert top.isced_code == "0541"
    assert [c.los_type for c in top.children] == ["Course", "Course", "Course"]
    assert top.children[0].result.grade == "B"
    assert top.children[0].result.credits == 7.5
    assert top.children[2].result.credits == 15.0
    assert ("report[0].issueDate", "2022-06-01") in doc.extras


def test_parse_namespaced_document(elmo_bytes):
    doc = parse_elmo(elmo_bytes("transcript_norway"))
    assert doc.learner.current_address.locality == "Trondheim"
    assert len(doc.learner.identifiers) == 2
    assert doc.attachments[0].type_label == "diploma supplement"
    assert doc.attachments[0].content == b"Diploma Supplement draft"
    module = doc.reports[0].children[0]
    assert module.los_type == "Module"
    assert [c.title for c in module.children] == ["Advanced Algorithms", "Graph Mining Seminar"]


def test_parse_minimal_document(elmo_bytes):
    doc = parse_elmo(elmo_bytes("minimal"))
    assert doc.learner.citizenship is None
    assert doc.learner.gender is None
    assert doc.learner.birth_date is None
    assert doc.learner.identifiers == ()
    assert doc.attachments == ()
    assert doc.xml_signature is None
    assert doc.reports[0].eqf_level is None
    assert doc.reports[0].result is None


def test_truncated_input_is_malformed(elmo_bytes):
    with pytest.raises(MalformedXml):
        parse_elmo(elmo_bytes("transcript_sweden")[:100])


def test_non_xml_is_malformed():
    with pytest.raises(MalformedXml):
        parse_elmo(b"<not-xml")
    with pytest.raises(MalformedXml):
        parse_elmo(b"\x00\xff\xfe garbage")


def test_oversize_input_rejected(elmo_bytes):
    data = elmo_bytes("transcript_sweden")
    with pytest.raises(OversizeInput):
        parse_elmo(data, max_bytes=len(data) - 1)


@pytest.mark.parametrize("element", ["generatedDate", "learner", "issuer", "report"])
def test_missing_mandatory_elements(elmo_bytes, element):
    xml = elmo_bytes("minimal").decode()
    if element == "report":
        start, end = xml.index("<report>"), xml.index("</report>") + len("</report>")
    elif element == "generatedDate":
        start, end = xml.index("<generatedDate>"), xml.index("</generatedDate>") + len("</generatedDate>")
    elif element == "learner":
        start, end = xml.index("<learner>"), xml.index("</learner>") + len("</learner>")
    else:
        start, end = xml.index("<issuer>"), xml.index("</issuer>") + len("</issuer>")
    broken = (xml[:start] + xml[end:]).encode()
    with pytest.raises(SchemaViolation):
        parse_elmo(broken)


def test_wrong_root_element():
    with pytest.raises(SchemaViolation):
        parse_elmo(b"<diploma><generatedDate>2022-01-01T00:00:00Z</generatedDate></diploma>")


def test_nesting_depth_guard():
    deep = "<title>T</title><type>Course</type>"
    for _ in range(9):
        deep = f"<title>T</title><type>Course</type><hasPart><learningOpportunitySpecification>{deep}</learningOpportunitySpecification></hasPart>"
    doc = f"""<elmo><generatedDate>2022-01-01T00:00:00Z</generatedDate>
    <learner><givenNames>A</givenNames><familyName>B</familyName></learner>
    <report><issuer><country>SE</country><identifier type="schac">x.se</identifier><title>U</title></issuer>
    <learningOpportunitySpecification>{deep}</learningOpportunitySpecification></report></elmo>"""
    with pytest.raises(SchemaViolation):
        parse_elmo(doc.encode())


@pytest.mark.parametrize("path", corpus_paths(), ids=lambda p: p.stem)
def test_parse_determinism(path):
    data = path.read_bytes()
    assert parse_elmo(data) == parse_elmo(data)


@pytest.mark.parametrize("path", corpus_paths(), ids=lambda p: p.stem)
def test_raw_bytes_hash_identical(path):
    data = path.read_bytes()
    doc = parse_elmo(data)
    assert hashlib.sha256(doc.raw_bytes).digest() == hashlib.sha256(data).digest()


def test_validate_clean_fixture(elmo_bytes, registries):
    report = validate_elmo(parse_elmo(elmo_bytes("transcript_sweden")), registries)
    assert report.errors == ()


def test_validate_unknown_country(elmo_bytes, registries):
    report = validate_elmo(parse_elmo(elmo_bytes("bad_country")), registries)
    assert [f.code for f in report.errors] == ["unknown-country"]
    assert report.errors[0].path == "learner.citizenship"


def test_validate_invalid_gender(elmo_bytes, registries):
    xml = _edit(elmo_bytes("transcript_sweden"), "<gender>2</gender>", "<gender>5</gender>")
    report = validate_elmo(parse_elmo(xml), registries)
    assert [f.code for f in report.errors] == ["invalid-gender-code"]


def test_validate_numeric_country_is_warning(elmo_bytes, registries):
    xml = _edit(elmo_bytes("transcript_sweden"),
                "<citizenship>SE</citizenship>", "<citizenship>752</citizenship>")
    report = validate_elmo(parse_elmo(xml), registries)
    assert report.errors == ()
    assert [f.code for f in report.warnings] == ["numeric-country-code"]


def test_validate_unknown_isced(elmo_bytes, registries):
    xml = _edit(elmo_bytes("transcript_sweden"), "<iscedCode>0541</iscedCode>",
                "<iscedCode>9999</iscedCode>")
    report = validate_elmo(parse_elmo(xml), registries)
    assert [f.code for f in report.errors] == ["unknown-isced-code"]


def test_validate_eqf_out_of_range(elmo_bytes, registries):
    xml = _edit(elmo_bytes("transcript_sweden"), '<level type="eqf">6</level>',
                '<level type="eqf">9</level>')
    report = validate_elmo(parse_elmo(xml), registries)
    assert [f.code for f in report.errors] == ["invalid-eqf-level"]


def test_validate_unknown_language(elmo_bytes, registries):
    xml = _edit(elmo_bytes("transcript_sweden"),
                "<languageOfInstruction>en</languageOfInstruction>",
                "<languageOfInstruction>qq</languageOfInstruction>")
    report = validate_elmo(parse_elmo(xml), registries)
    assert [f.code for f in report.errors] == ["unknown-language-code"]


def test_los_identifiers_preserved_as_extras(elmo_bytes):
    xml = _edit(elmo_bytes("minimal"),
                "<title>Voorbereidend Wetenschappelijk Onderwijs</title>",
                '<identifier type="local">VWO-2024-001</identifier>'
                "<title>Voorbereidend Wetenschappelijk Onderwijs</title>")
    doc = parse_elmo(xml)
    assert ("identifiers[0].type", "local") in doc.reports[0].extras
    assert ("identifiers[0]", "VWO-2024-001") in doc.reports[0].extras


def test_detect_certificate(elmo_bytes):
    doc = parse_elmo(elmo_bytes("certificate_germany"))
    assert detect_document_type(doc) is DocumentType.UPPER_SECONDARY_SCHOOL_CERTIFICATE


def test_detect_transcript(elmo_bytes):
    doc = parse_elmo(elmo_bytes("transcript_sweden"))
    assert detect_document_type(doc) is DocumentType.TRANSCRIPT_OF_RECORDS


def test_detect_unclassifiable(elmo_bytes):
    xml = _edit(elmo_bytes("certificate_finland"), "<type>Diploma</type>", "<type>workshop</type>")
    with pytest.raises(UnclassifiableDocument):
        detect_document_type(parse_elmo(xml))


@pytest.mark.parametrize("path", corpus_paths(), ids=lambda p: p.stem)
def test_classification_totality(path):
    doc = parse_elmo(path.read_bytes())
    try:
        assert detect_document_type(doc) in DocumentType
    except UnclassifiableDocument:
        pass  # an allowed outcome; anything else would fail the test


def _xml_leaf_values(data: bytes) -> list[str]:
    """Independent enumeration of claim leaves straight off the XML: every
    element with non-empty text and no element children, excluding the
    enveloped signature subtree."""
    root = ET.fromstring(data)
    values = []

    def walk(elem, in_signature):
        tag = elem.tag.rsplit("}", 1)[-1] if isinstance(elem.tag, str) else ""
        in_signature = in_signature or tag == "Signature"
        kids = [k for k in elem if isinstance(k.tag, str)]
        if not in_signature and not kids and elem.text and elem.text.strip():
            values.append(elem.text.strip())
        for kid in kids:
            walk(kid, in_signature)

    walk(root, False)
    return values


@pytest.mark.parametrize("path", corpus_paths(), ids=lambda p: p.stem)
def test_no_silent_data_loss_at_parse(path):
    """Every leaf text node of the input is reachable through a typed field
    or the extras map."""
    data = path.read_bytes()
    doc = parse_elmo(data)
    model_values = [v for _, v in leaf_claims(doc)]
    xml_values = _xml_leaf_values(data)
    for value in xml_values:
        assert value in model_values, f"lost claim value {value!r}"
        model_values.remove(value)  # multiset containment
