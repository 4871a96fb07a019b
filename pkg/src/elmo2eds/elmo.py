"""Parse, validate and classify ELMO XML credentials.

The parser targets the mandatory core of the public ELMO schema
(``generatedDate``, ``learner``, ``report``/``issuer`` and the
``learningOpportunitySpecification`` tree) and is namespace-agnostic:
elements are matched by local name, so both namespaced and plain documents
are accepted.  Recognized elements populate typed fields; everything else
is preserved verbatim in an ``extras`` list on the nearest typed parent so
that no claim is lost before conversion.

Claim paths
-----------
Every leaf claim in a parsed document is addressable by a dotted path
mirroring the XML layout, e.g. ``learner.citizenship``,
``issuer.identifiers[0].type``, ``reports[0].hasPart[2].result.resultLabel``.
``leaf_claims`` enumerates all of them (the enveloped XML signature block is
deliberately excluded; it never counts as a claim).
"""

from __future__ import annotations

import base64
import binascii
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Iterator, Optional

from .errors import MalformedXml, OversizeInput, SchemaViolation, UnclassifiableDocument
from .standards import GENDER_WORDS, StandardsRegistries, lookup, validate_eqf_level

DEFAULT_MAX_INPUT_BYTES = 10 * 1024 * 1024
MAX_TREE_DEPTH = 8

XMLDSIG_NS = "http://www.w3.org/2000/09/xmldsig#"
XML_LANG = "{http://www.w3.org/XML/1998/namespace}lang"

_LOS_TYPE_CANON = {
    "degree programme": "DegreeProgramme",
    "degreeprogramme": "DegreeProgramme",
    "module": "Module",
    "course": "Course",
    "diploma": "Diploma",
}


class DocumentType(str, Enum):
    UPPER_SECONDARY_SCHOOL_CERTIFICATE = "UpperSecondarySchoolCertificate"
    TRANSCRIPT_OF_RECORDS = "TranscriptOfRecords"


@dataclass(frozen=True)
class ElmoAddress:
    lines: tuple[str, ...] = ()
    postal_code: Optional[str] = None
    locality: Optional[str] = None
    country: Optional[str] = None


@dataclass(frozen=True)
class ElmoLearner:
    given_name: str
    family_name: str
    citizenship: Optional[str] = None
    identifiers: tuple[tuple[str, str], ...] = ()
    birth_date: Optional[str] = None
    gender: Optional[int] = None
    current_address: Optional[ElmoAddress] = None
    extras: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class ElmoIssuer:
    country: str
    title: str
    identifiers: tuple[tuple[str, str], ...] = ()
    title_lang: Optional[str] = None
    url: Optional[str] = None
    current_address: Optional[ElmoAddress] = None
    extras: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class ElmoResult:
    grade: Optional[str] = None
    credits: Optional[float] = None
    credit_scheme: Optional[str] = None
    status: Optional[str] = None


@dataclass(frozen=True)
class ElmoLearningOpportunity:
    los_type: str  # DegreeProgramme | Module | Course | Diploma | Other
    los_type_raw: str
    title: str
    title_lang: Optional[str] = None
    isced_code: Optional[str] = None
    eqf_level: Optional[int] = None
    language_of_instruction: Optional[str] = None
    grading_scheme: Optional[str] = None
    result: Optional[ElmoResult] = None
    children: tuple["ElmoLearningOpportunity", ...] = ()
    extras: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class ElmoAttachment:
    type_label: str
    content: bytes
    mime_type: str
    content_b64: str = ""


@dataclass(frozen=True)
class ElmoXmlSignature:
    signed_info_digest_algorithm: str = ""
    signature_algorithm: str = ""
    digest_value: bytes = b""
    signature_value: bytes = b""
    certificate: bytes = b""


@dataclass(frozen=True)
class ElmoDocument:
    generated_date: str
    learner: ElmoLearner
    issuer: ElmoIssuer
    reports: tuple[ElmoLearningOpportunity, ...]
    attachments: tuple[ElmoAttachment, ...] = ()
    xml_signature: Optional[ElmoXmlSignature] = None
    raw_bytes: bytes = b""
    extras: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class Finding:
    severity: str  # error | warning
    path: str
    code: str
    message: str = ""


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...] = ()

    @property
    def errors(self) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.severity == "error")

    @property
    def warnings(self) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.severity == "warning")


def _local(tag) -> str:
    if not isinstance(tag, str):
        return ""  # comments / processing instructions
    return tag.rsplit("}", 1)[-1]


def _text(elem: Optional[ET.Element]) -> Optional[str]:
    if elem is None or elem.text is None:
        return None
    stripped = elem.text.strip()
    return stripped or None


def _children(elem: ET.Element, name: str) -> list[ET.Element]:
    return [c for c in elem if _local(c.tag) == name]

def _child(elem: ET.Element, name: str) -> Optional[ET.Element]:
    found = _children(elem, name)
    return found[0] if found else None


def _descend_extras(elem: ET.Element, prefix: str, sink: list[tuple[str, str]]) -> None:
    """Preserve an unrecognized element subtree as (path, text) leaf pairs."""
    kids = [c for c in elem if isinstance(c.tag, str)]
    txt = _text(elem)
    if txt is not None:
        sink.append((prefix, txt))
    counts: dict[str, int] = {}
    for kid in kids:
        name = _local(kid.tag)
        idx = counts.get(name, 0)
        counts[name] = idx + 1
        suffix = f"[{idx}]" if len(_children(elem, name)) > 1 else ""
        _descend_extras(kid, f"{prefix}.{name}{suffix}", sink)


def _parse_address(elem: ET.Element) -> ElmoAddress:
    lines = tuple(t for line in _children(elem, "addressLine") if (t := _text(line)))
    kwargs = {}
    for name, attr in (("postalCode", "postal_code"), ("locality", "locality"), ("country", "country")):
        kwargs[attr] = _text(_child(elem, name))
    return ElmoAddress(lines=lines, **kwargs)


def _parse_identifiers(elem: ET.Element) -> tuple[tuple[str, str], ...]:
    out = []
    for ident in _children(elem, "identifier"):
        value = _text(ident)
        if value is None:
            continue
        out.append((ident.get("type", "other"), value))
    return tuple(out)


def _parse_learner(elem: ET.Element) -> ElmoLearner:
    given = _text(_child(elem, "givenNames"))
    family = _text(_child(elem, "familyName"))
    if given is None or family is None:
        raise SchemaViolation("learner must carry givenNames and familyName", path="learner")
    extras: list[tuple[str, str]] = []
    gender_text = _text(_child(elem, "gender"))
    gender = int(gender_text) if gender_text is not None and gender_text.isdigit() else None
    if gender_text is not None and gender is None:
        extras.append(("gender", gender_text))
    address_elem = _child(elem, "currentAddress")
    known = {"givenNames", "familyName", "citizenship", "identifier", "bday", "gender", "currentAddress"}
    for kid in elem:
        if _local(kid.tag) not in known:
            _descend_extras(kid, _local(kid.tag), extras)
    return ElmoLearner(
        given_name=given,
        family_name=family,
        citizenship=_text(_child(elem, "citizenship")),
        identifiers=_parse_identifiers(elem),
        birth_date=_text(_child(elem, "bday")),
        gender=gender,
        current_address=_parse_address(address_elem) if address_elem is not None else None,
        extras=tuple(extras),
    )


def _parse_issuer(elem: ET.Element) -> ElmoIssuer:
    country = _text(_child(elem, "country"))
    title_elem = _child(elem, "title")
    title = _text(title_elem)
    if country is None or title is None:
        raise SchemaViolation("issuer must carry country and title", path="issuer")
    extras: list[tuple[str, str]] = []
    known = {"country", "identifier", "title", "url", "currentAddress"}
    for kid in elem:
        if _local(kid.tag) not in known:
            _descend_extras(kid, _local(kid.tag), extras)
    address_elem = _child(elem, "currentAddress")
    return ElmoIssuer(
        country=country,
        title=title,
        title_lang=title_elem.get(XML_LANG) if title_elem is not None else None,
        identifiers=_parse_identifiers(elem),
        url=_text(_child(elem, "url")),
        current_address=_parse_address(address_elem) if address_elem is not None else None,
        extras=tuple(extras),
    )


def _parse_result(elem: ET.Element, extras: list[tuple[str, str]]) -> tuple[Optional[ElmoResult], Optional[str]]:
    """Parse a learningOpportunityInstance into (result, grading_scheme)."""
    status = _text(_child(elem, "status"))
    if status is not None and status.lower() in ("in progress", "inprogress"):
        status = "inProgress"
    grade = _text(_child(elem, "resultLabel"))
    scheme = None
    credits = None
    credit_elem = _child(elem, "credit")
    if credit_elem is not None:
        scheme = _text(_child(credit_elem, "scheme"))
        value = _text(_child(credit_elem, "value"))
        if value is not None:
            try:
                credits = float(value)
            except ValueError:
                extras.append(("result.credit.value", value))
    grading_scheme = _text(_child(elem, "gradingScheme"))
    known = {"status", "resultLabel", "credit", "gradingScheme"}
    for kid in elem:
        if _local(kid.tag) not in known:
            _descend_extras(kid, f"result.{_local(kid.tag)}", extras)
    if status is None and grade is None and credits is None and scheme is None:
        result = None
    else:
        result = ElmoResult(grade=grade, credits=credits, credit_scheme=scheme, status=status)
    return result, grading_scheme


def _parse_los(elem: ET.Element, depth: int) -> ElmoLearningOpportunity:
    if depth > MAX_TREE_DEPTH:
        raise SchemaViolation(f"learning opportunity nesting exceeds depth {MAX_TREE_DEPTH}")
    title_elem = _child(elem, "title")
    title = _text(title_elem) or ""
    type_raw = _text(_child(elem, "type")) or ""
    los_type = _LOS_TYPE_CANON.get(type_raw.lower(), "Other")
    extras: list[tuple[str, str]] = []

    eqf_level = None
    level_elem = _child(elem, "level")
    if level_elem is not None:
        level_text = _text(level_elem)
        level_kind = level_elem.get("type", "eqf").lower()
        if level_kind == "eqf" and level_text is not None and level_text.lstrip("-").isdigit():
            eqf_level = int(level_text)
        elif level_text is not None:
            # NQF and other frameworks are opaque passthrough claims.
            extras.append((f"level.{level_kind}", level_text))

    result = None
    grading_scheme = _text(_child(elem, "gradingScheme"))
    specifies = _child(elem, "specifies")
    if specifies is not None:
        instance = _child(specifies, "learningOpportunityInstance")
        if instance is not None:
            result, instance_scheme = _parse_result(instance, extras)
            grading_scheme = grading_scheme or instance_scheme

    children = []
    for part in _children(elem, "hasPart"):
        for kid in _children(part, "learningOpportunitySpecification"):
            children.append(_parse_los(kid, depth + 1))

    known = {"title", "type", "iscedCode", "level", "languageOfInstruction",
             "gradingScheme", "specifies", "hasPart", "identifier"}
    for kid in elem:
        name = _local(kid.tag)
        if name == "identifier":
            continue  # handled below to keep scheme attributes
        if name not in known:
            _descend_extras(kid, name, extras)
    for i, (scheme, value) in enumerate(_parse_identifiers(elem)):
        extras.append((f"identifiers[{i}].type", scheme))
        extras.append((f"identifiers[{i}]", value))

    return ElmoLearningOpportunity(
        los_type=los_type,
        los_type_raw=type_raw,
        title=title,
        title_lang=title_elem.get(XML_LANG) if title_elem is not None else None,
        isced_code=_text(_child(elem, "iscedCode")),
        eqf_level=eqf_level,
        language_of_instruction=_text(_child(elem, "languageOfInstruction")),
        grading_scheme=grading_scheme,
        result=result,
        children=tuple(children),
        extras=tuple(extras),
    )


def _parse_attachment(elem: ET.Element, index: int, extras: list[tuple[str, str]]) -> Optional[ElmoAttachment]:
    content_elem = _child(elem, "content")
    b64 = _text(content_elem) or ""
    try:
        content = base64.b64decode(b64, validate=True) if b64 else b""
    except (binascii.Error, ValueError):
        content = b64.encode("utf-8")
    known = {"type", "mimeType", "content"}
    for kid in elem:
        if _local(kid.tag) not in known:
            _descend_extras(kid, f"attachments[{index}].{_local(kid.tag)}", extras)
    return ElmoAttachment(
        type_label=_text(_child(elem, "type")) or "attachment",
        content=content,
        mime_type=_text(_child(elem, "mimeType")) or "application/octet-stream",
        content_b64=b64,
    )


def _b64_field(sig: ET.Element, name: str) -> bytes:
    for elem in sig.iter():
        if _local(elem.tag) == name:
            try:
                return base64.b64decode("".join((elem.text or "").split()))
            except (binascii.Error, ValueError):
                return b""
    return b""


def _alg_attr(sig: ET.Element, name: str) -> str:
    for elem in sig.iter():
        if _local(elem.tag) == name:
            return elem.get("Algorithm", "")
    return ""


def _parse_signature(sig: ET.Element) -> ElmoXmlSignature:
    return ElmoXmlSignature(
        signed_info_digest_algorithm=_alg_attr(sig, "DigestMethod"),
        signature_algorithm=_alg_attr(sig, "SignatureMethod"),
        digest_value=_b64_field(sig, "DigestValue"),
        signature_value=_b64_field(sig, "SignatureValue"),
        certificate=_b64_field(sig, "X509Certificate"),
    )


def parse_elmo(data: bytes, max_bytes: int = DEFAULT_MAX_INPUT_BYTES) -> ElmoDocument:
    """Parse ELMO XML bytes into an ElmoDocument.

    Raises OversizeInput, MalformedXml or SchemaViolation.  Value-domain
    problems (unknown codes, out-of-range levels) are NOT parse errors;
    they are reported by validate_elmo.
    """
    if len(data) > max_bytes:
        raise OversizeInput(f"input is {len(data)} bytes, limit {max_bytes}")
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise MalformedXml(f"not well-formed XML: {exc}") from None
    if _local(root.tag) != "elmo":
        raise SchemaViolation(f"root element is {_local(root.tag)!r}, expected 'elmo'")

    generated = _text(_child(root, "generatedDate"))
    if generated is None:
        raise SchemaViolation("missing mandatory element generatedDate", path="generatedDate")
    learner_elem = _child(root, "learner")
    if learner_elem is None:
        raise SchemaViolation("missing mandatory element learner", path="learner")
    report_elems = _children(root, "report")
    if not report_elems:
        raise SchemaViolation("missing mandatory element report", path="report")
    issuer_elem = _child(report_elems[0], "issuer")
    if issuer_elem is None:
        raise SchemaViolation("missing mandatory element issuer", path="report.issuer")

    extras: list[tuple[str, str]] = []
    learner = _parse_learner(learner_elem)
    issuer = _parse_issuer(issuer_elem)

    reports: list[ElmoLearningOpportunity] = []
    for r, report_elem in enumerate(report_elems):
        known = {"issuer", "learningOpportunitySpecification"}
        for kid in report_elem:
            name = _local(kid.tag)
            if name == "issuer" and report_elem is report_elems[0]:
                continue
            if name in known:
                continue
            _descend_extras(kid, f"report[{r}].{name}", extras)
        for los in _children(report_elem, "learningOpportunitySpecification"):
            reports.append(_parse_los(los, depth=1))
    if not reports:
        raise SchemaViolation("no learningOpportunitySpecification in any report", path="report")

    attachments = []
    for i, att in enumerate(_children(root, "attachment")):
        parsed = _parse_attachment(att, i, extras)
        if parsed is not None:
            attachments.append(parsed)

    signature = None
    for kid in root:
        if _local(kid.tag) == "Signature":
            signature = _parse_signature(kid)

    known_root = {"generatedDate", "learner", "report", "attachment", "Signature"}
    for kid in root:
        name = _local(kid.tag)
        if name not in known_root and isinstance(kid.tag, str):
            _descend_extras(kid, name, extras)

    return ElmoDocument(
        generated_date=generated,
        learner=learner,
        issuer=issuer,
        reports=tuple(reports),
        attachments=tuple(attachments),
        xml_signature=signature,
        raw_bytes=bytes(data),
        extras=tuple(extras),
    )


def parse_timestamp(value: str) -> datetime:
    """Parse an ISO 8601 timestamp (Z suffix tolerated)."""
    return datetime.fromisoformat(value.replace("Z", "+00:00"))


_NUMERIC_COUNTRY = re.compile(r"^\d{1,3}$")


def validate_elmo(doc: ElmoDocument, registries: StandardsRegistries) -> ValidationReport:
    """Check every claim against its standard's value domain.

    Unknown country/ISCED/language codes and out-of-domain gender or EQF
    values are errors; numeric country codes (the ISO 3166-1 numeric
    spelling) are accepted with a warning.  Absent optional fields are
    never findings.
    """
    findings: list[Finding] = []

    def country_check(code: Optional[str], path: str) -> None:
        if code is None:
            return
        if _NUMERIC_COUNTRY.match(code):
            findings.append(Finding("warning", path, "numeric-country-code",
                                    f"{code!r} looks like an ISO 3166-1 numeric code; alpha-2 expected"))
            return
        if lookup(registries, "ISO3166_1_ALPHA2", code) is None:
            findings.append(Finding("error", path, "unknown-country", f"unassigned country code {code!r}"))

    try:
        parse_timestamp(doc.generated_date)
    except ValueError:
        findings.append(Finding("error", "generatedDate", "invalid-timestamp",
                                f"{doc.generated_date!r} is not an ISO 8601 timestamp"))

    country_check(doc.learner.citizenship, "learner.citizenship")
    country_check(doc.issuer.country, "issuer.country")
    if doc.learner.gender is not None and doc.learner.gender not in GENDER_WORDS:
        findings.append(Finding("error", "learner.gender", "invalid-gender-code",
                                f"gender code {doc.learner.gender} outside ISO/IEC 5218"))
    if not doc.issuer.identifiers:
        findings.append(Finding("error", "issuer.identifier", "missing-issuer-identifier",
                                "issuer carries no identifier"))

    def walk(node: ElmoLearningOpportunity, path: str) -> None:
        if node.isced_code is not None and lookup(registries, "ISCED_F_2013", node.isced_code) is None:
            findings.append(Finding("error", f"{path}.iscedCode", "unknown-isced-code",
                                    f"unassigned ISCED-F 2013 code {node.isced_code!r}"))
        if node.eqf_level is not None and not validate_eqf_level(node.eqf_level):
            findings.append(Finding("error", f"{path}.level", "invalid-eqf-level",
                                    f"EQF level {node.eqf_level} outside 1..8"))
        if node.language_of_instruction is not None and \
                lookup(registries, "ISO639_1", node.language_of_instruction) is None:
            findings.append(Finding("error", f"{path}.languageOfInstruction", "unknown-language-code",
                                    f"unassigned ISO 639-1 code {node.language_of_instruction!r}"))
        if node.result is not None and node.result.credits is not None and node.result.credits < 0:
            findings.append(Finding("error", f"{path}.result.credit.value", "invalid-credits",
                                    f"credits {node.result.credits} is negative"))
        for j, kid in enumerate(node.children):
            walk(kid, f"{path}.hasPart[{j}]")

    for i, report in enumerate(doc.reports):
        walk(report, f"reports[{i}]")

    return ValidationReport(findings=tuple(findings))


def _subtree_has_result(node: ElmoLearningOpportunity) -> bool:
    return any(kid.result is not None or _subtree_has_result(kid) for kid in node.children)


def _subtree_course_result(node: ElmoLearningOpportunity) -> bool:
    for kid in node.children:
        if kid.result is not None and kid.los_type in ("Course", "Module"):
            return True
        if _subtree_course_result(kid):
            return True
    return False


def detect_document_type(doc: ElmoDocument) -> DocumentType:
    """Classify a validated document.

    TranscriptOfRecords iff any descendant Course/Module carries a result;
    UpperSecondarySchoolCertificate iff the single top-level opportunity is
    a Diploma or DegreeProgramme at EQF level <= 4 (or unstated) and no
    descendant carries a result.  Anything else is unclassifiable and
    requires an explicit type override.
    """
    if any(_subtree_course_result(top) for top in doc.reports):
        return DocumentType.TRANSCRIPT_OF_RECORDS
    if len(doc.reports) == 1:
        top = doc.reports[0]
        if top.los_type in ("Diploma", "DegreeProgramme") \
                and (top.eqf_level is None or top.eqf_level <= 4) \
                and not _subtree_has_result(top):
            return DocumentType.UPPER_SECONDARY_SCHOOL_CERTIFICATE
    raise UnclassifiableDocument(
        "document matches neither the certificate nor the transcript rule; pass an explicit type")


def _address_leaves(addr: Optional[ElmoAddress], prefix: str) -> Iterator[tuple[str, str]]:
    if addr is None:
        return
    for i, line in enumerate(addr.lines):
        yield f"{prefix}.addressLine[{i}]", line
    for name, value in (("postalCode", addr.postal_code), ("locality", addr.locality), ("country", addr.country)):
        if value is not None:
            yield f"{prefix}.{name}", value


def opportunity_leaves(node: ElmoLearningOpportunity, prefix: str) -> Iterator[tuple[str, str]]:
    yield f"{prefix}.title", node.title
    if node.title_lang is not None:
        yield f"{prefix}.title.lang", node.title_lang
    if node.los_type_raw:
        yield f"{prefix}.type", node.los_type_raw
    for name, value in (("iscedCode", node.isced_code),
                        ("languageOfInstruction", node.language_of_instruction),
                        ("gradingScheme", node.grading_scheme)):
        if value is not None:
            yield f"{prefix}.{name}", value
    if node.eqf_level is not None:
        yield f"{prefix}.level", str(node.eqf_level)
    if node.result is not None:
        res = node.result
        if res.status is not None:
            yield f"{prefix}.result.status", res.status
        if res.grade is not None:
            yield f"{prefix}.result.resultLabel", res.grade
        if res.credit_scheme is not None:
            yield f"{prefix}.result.credit.scheme", res.credit_scheme
        if res.credits is not None:
            yield f"{prefix}.result.credit.value", _format_number(res.credits)
    for path, text in node.extras:
        yield f"{prefix}.{path}", text
    for j, kid in enumerate(node.children):
        yield from opportunity_leaves(kid, f"{prefix}.hasPart[{j}]")


def _format_number(value: float) -> str:
    return str(int(value)) if value == int(value) else repr(value)


def leaf_claims(doc: ElmoDocument) -> list[tuple[str, str]]:
    """All (path, value) leaf claims of the document, signature excluded."""
    out: list[tuple[str, str]] = [("generatedDate", doc.generated_date)]
    ln = doc.learner
    out.append(("learner.givenNames", ln.given_name))
    out.append(("learner.familyName", ln.family_name))
    if ln.citizenship is not None:
        out.append(("learner.citizenship", ln.citizenship))
    if ln.birth_date is not None:
        out.append(("learner.bday", ln.birth_date))
    if ln.gender is not None:
        out.append(("learner.gender", str(ln.gender)))
    for i, (scheme, value) in enumerate(ln.identifiers):
        out.append((f"learner.identifiers[{i}].type", scheme))
        out.append((f"learner.identifiers[{i}]", value))
    out.extend(_address_leaves(ln.current_address, "learner.currentAddress"))
    for path, text in ln.extras:
        out.append((f"learner.{path}", text))

    iss = doc.issuer
    out.append(("issuer.country", iss.country))
    out.append(("issuer.title", iss.title))
    if iss.title_lang is not None:
        out.append(("issuer.title.lang", iss.title_lang))
    if iss.url is not None:
        out.append(("issuer.url", iss.url))
    for i, (scheme, value) in enumerate(iss.identifiers):
        out.append((f"issuer.identifiers[{i}].type", scheme))
        out.append((f"issuer.identifiers[{i}]", value))
    out.extend(_address_leaves(iss.current_address, "issuer.currentAddress"))
    for path, text in iss.extras:
        out.append((f"issuer.{path}", text))

    for i, report in enumerate(doc.reports):
        out.extend(opportunity_leaves(report, f"reports[{i}]"))

    for i, att in enumerate(doc.attachments):
        out.append((f"attachments[{i}].type", att.type_label))
        out.append((f"attachments[{i}].mimeType", att.mime_type))
        if att.content_b64:
            out.append((f"attachments[{i}].content", att.content_b64))

    out.extend(doc.extras)
    return out
