"""ELMO-to-EDS conversion: template selection, claim/standard/structure
mapping, carry-over of unmapped claims, and DID/signature placeholders.

Mapping table
-------------
Document-level claims (both templates)::

    generatedDate        -> issuanceDate                    timestamp-to-utc
    learner.givenNames   -> credentialSubject.givenName     identity
    learner.familyName   -> credentialSubject.familyName    identity
    learner.citizenship  -> credentialSubject.citizenship   identity
    learner.gender       -> credentialSubject.gender        gender-code-to-word

Per-opportunity claims (sources relative to a learning opportunity, targets
relative to the achievement it maps onto)::

    title                -> title                 identity
    iscedCode            -> iscedCode             identity
    level                -> eqfLevel              text-to-int
    languageOfInstruction-> languageOfInstruction language-display-name
    gradingScheme        -> gradingScheme         grading-scheme
    result.resultLabel   -> grade                 grading-scheme
    result.credit.value  -> credits               text-to-number

The language slot carries the ISO 639-1 display name (the EDS column names
a different classification whose public code list is unavailable); the
original two-letter code is always recorded in the extension block.

The transcript template applies the per-opportunity rows recursively
(children become subAchievements, preserving tree shape); the certificate
template maps only the top-level opportunities and sends every descendant
claim to the extension block.  Any source claim without a mapping row lands
in ``extension`` keyed by its source path, so no input claim is ever
dropped.  The original ``generatedDate`` is additionally retained in the
extension next to the derived ``issuanceDate``.

A mapping-override file (one ``source<TAB>target<TAB>transform`` record per
line) may re-route any source to another known target slot or to
``extension``, absorbing schema drift without code changes.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace
from datetime import timezone
from enum import Enum
from pathlib import Path
from typing import Optional

from .eds import (
    BASE_TYPES,
    CREDENTIALS_CONTEXT,
    HOLDER_PLACEHOLDER_DID,
    ISSUER_PLACEHOLDER_DID,
    JWS_PLACEHOLDER,
    PROOF_TYPE_JWS,
    SCHEMA_PLACEHOLDER_ID,
    SCHEMA_REF_TYPE,
    Did,
    EdsAchievement,
    EdsCredential,
    EdsSubject,
    ProofBlock,
    check_invariants,
)
from .elmo import (
    DocumentType,
    ElmoDocument,
    ElmoLearningOpportunity,
    detect_document_type,
    opportunity_leaves,
    parse_timestamp,
)
from .errors import ConfigError, InvariantViolation, UnmappableClaim
from .standards import StandardsRegistries, map_gender, map_grading_scheme
from .standards import lookup as standards_lookup

TRANSFORM_IDS = ("identity", "timestamp-to-utc", "gender-code-to-word",
                 "text-to-int", "text-to-number", "grading-scheme",
                 "language-display-name")

DOC_TARGET_SLOTS = ("issuanceDate", "credentialSubject.givenName", "credentialSubject.familyName",
                    "credentialSubject.citizenship", "credentialSubject.gender", "extension")
NODE_TARGET_SLOTS = ("title", "iscedCode", "eqfLevel", "languageOfInstruction",
                     "gradingScheme", "grade", "credits", "extension")


class ConversionMode(str, Enum):
    PLACEHOLDER = "placeholder"
    SIGNING = "signing"


@dataclass(frozen=True)
class ClaimMapping:
    source: str
    target: str
    transform: str = "identity"


@dataclass(frozen=True)
class ConversionTemplate:
    document_type: DocumentType
    claim_mappings: tuple[ClaimMapping, ...]
    node_mappings: tuple[ClaimMapping, ...]
    recurse_achievements: bool
    required_targets: tuple[str, ...]


@dataclass(frozen=True)
class ConversionOptions:
    mode: ConversionMode = ConversionMode.PLACEHOLDER
    holder_did: Optional[Did] = None
    issuer_did: Optional[Did] = None
    explicit_type_override: Optional[DocumentType] = None
    schema_id: str = SCHEMA_PLACEHOLDER_ID
    mapping_overrides: tuple[ClaimMapping, ...] = ()

    def __post_init__(self):
        if self.mode == ConversionMode.SIGNING and (self.holder_did is None or self.issuer_did is None):
            raise InvariantViolation("signing mode requires both holder and issuer DIDs")


@dataclass(frozen=True)
class ConversionReport:
    credential: EdsCredential
    carried_extensions: tuple[tuple[str, str], ...]
    warnings: tuple[str, ...]
    # one (source-path, target-path, emitted-value) row per mapped claim
    mapped_claims: tuple[tuple[str, str, str], ...] = ()


_COMMON_CLAIM_MAPPINGS = (
    ClaimMapping("generatedDate", "issuanceDate", "timestamp-to-utc"),
    ClaimMapping("learner.givenNames", "credentialSubject.givenName", "identity"),
    ClaimMapping("learner.familyName", "credentialSubject.familyName", "identity"),
    ClaimMapping("learner.citizenship", "credentialSubject.citizenship", "identity"),
    ClaimMapping("learner.gender", "credentialSubject.gender", "gender-code-to-word"),
)

_NODE_MAPPINGS = (
    ClaimMapping("title", "title", "identity"),
    ClaimMapping("iscedCode", "iscedCode", "identity"),
    ClaimMapping("level", "eqfLevel", "text-to-int"),
    ClaimMapping("languageOfInstruction", "languageOfInstruction", "language-display-name"),
    ClaimMapping("gradingScheme", "gradingScheme", "grading-scheme"),
    ClaimMapping("result.resultLabel", "grade", "grading-scheme"),
    ClaimMapping("result.credit.value", "credits", "text-to-number"),
)

_REQUIRED_TARGETS = ("issuer", "issuanceDate", "credentialSubject.id",
                     "credentialSubject.givenName", "credentialSubject.familyName",
                     "credentialSubject.achievements[0].title")

_CERTIFICATE_TEMPLATE = ConversionTemplate(
    document_type=DocumentType.UPPER_SECONDARY_SCHOOL_CERTIFICATE,
    claim_mappings=_COMMON_CLAIM_MAPPINGS,
    node_mappings=_NODE_MAPPINGS,
    recurse_achievements=False,
    required_targets=_REQUIRED_TARGETS,
)

_TRANSCRIPT_TEMPLATE = ConversionTemplate(
    document_type=DocumentType.TRANSCRIPT_OF_RECORDS,
    claim_mappings=_COMMON_CLAIM_MAPPINGS,
    node_mappings=_NODE_MAPPINGS,
    recurse_achievements=True,
    required_targets=_REQUIRED_TARGETS,
)


def select_template(dt: DocumentType) -> ConversionTemplate:
    if dt is DocumentType.TRANSCRIPT_OF_RECORDS:
        return _TRANSCRIPT_TEMPLATE
    return _CERTIFICATE_TEMPLATE


def load_mapping_overrides(path: Path) -> tuple[ClaimMapping, ...]:
    """Read override rows (``source<TAB>target<TAB>transform`` per line)."""
    rows = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) not in (2, 3):
            raise ConfigError(f"{path}:{lineno}: expected source<TAB>target[<TAB>transform]")
        transform = parts[2] if len(parts) == 3 else "identity"
        if transform not in TRANSFORM_IDS:
            raise ConfigError(f"{path}:{lineno}: unknown transform {transform!r}")
        rows.append(ClaimMapping(parts[0], parts[1], transform))
    return tuple(rows)


def apply_overrides(template: ConversionTemplate,
                    overrides: tuple[ClaimMapping, ...]) -> ConversionTemplate:
    if not overrides:
        return template
    doc_rows = {m.source: m for m in template.claim_mappings}
    node_rows = {m.source: m for m in template.node_mappings}
    for row in overrides:
        if row.source.startswith(("learner.", "generatedDate", "issuer.")):
            if row.target not in DOC_TARGET_SLOTS:
                raise ConfigError(f"unknown document-level target slot {row.target!r}")
            doc_rows[row.source] = row
        else:
            if row.target not in NODE_TARGET_SLOTS:
                raise ConfigError(f"unknown achievement-level target slot {row.target!r}")
            node_rows[row.source] = row
    return replace(template,
                   claim_mappings=tuple(doc_rows.values()),
                   node_mappings=tuple(node_rows.values()))


def _to_utc(value: str) -> str:
    ts = parse_timestamp(value)
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _format_number(value: float) -> str:
    return str(int(value)) if value == int(value) else repr(value)


class _Builder:
    """Accumulates mapped slots, carried claims, the trace and warnings for
    one conversion run."""

    def __init__(self, template: ConversionTemplate, registries: StandardsRegistries):
        self.template = template
        self.registries = registries
        self.doc_rows = {m.source: m for m in template.claim_mappings}
        self.node_rows = {m.source: m for m in template.node_mappings}
        self.carried: list[tuple[str, str]] = []
        self.trace: list[tuple[str, str, str]] = []
        self.warnings: list[str] = []

    def carry(self, path: str, value: str) -> None:
        self.carried.append((path, value))

    def map_doc_claim(self, source: str, value: Optional[str]) -> dict:
        """Apply a document-level mapping row; returns {slot: value} or
        carries the claim.  Empty dict when the value is absent."""
        if value is None:
            return {}
        row = self.doc_rows.get(source)
        if row is None or row.target == "extension":
            self.carry(source, value)
            return {}
        out = self._apply_transform(row.transform, value)
        self.trace.append((source, row.target, str(out)))
        return {row.target: out}

    def _apply_transform(self, transform: str, value: str):
        if transform == "identity":
            return value
        if transform == "timestamp-to-utc":
            return _to_utc(value)
        if transform == "gender-code-to-word":
            return map_gender(int(value))
        if transform == "text-to-int":
            return int(value)
        if transform == "text-to-number":
            return float(value)
        if transform == "grading-scheme":
            return value  # paired handling lives in _build_achievement
        if transform == "language-display-name":
            return standards_lookup(self.registries, "ISO639_1", value) or value
        raise ConfigError(f"unknown transform {transform!r}")

    def node_slot(self, rel_source: str) -> Optional[ClaimMapping]:
        row = self.node_rows.get(rel_source)
        if row is None or row.target == "extension":
            return None
        return row

    def carry_node_claim(self, prefix: str, rel_source: str, value: Optional[str]) -> None:
        if value is not None:
            self.carry(f"{prefix}.{rel_source}", value)

    def map_node_claim(self, prefix: str, tgt_prefix: str, rel_source: str,
                       value: Optional[str], slots: dict, transformed=None) -> None:
        """Route one per-opportunity claim either to its achievement slot or
        to the extension block."""
        if value is None:
            return
        row = self.node_slot(rel_source)
        if row is None:
            self.carry(f"{prefix}.{rel_source}", value)
            return
        out = transformed if transformed is not None else self._apply_transform(row.transform, value)
        slots[row.target] = out
        self.trace.append((f"{prefix}.{rel_source}", f"{tgt_prefix}.{row.target}", str(out)))


def _build_achievement(builder: _Builder, node: ElmoLearningOpportunity,
                       prefix: str, tgt_prefix: str, recurse: bool) -> EdsAchievement:
    slots: dict = {}

    builder.map_node_claim(prefix, tgt_prefix, "title", node.title or None, slots)
    builder.carry_node_claim(prefix, "title.lang", node.title_lang)
    builder.carry_node_claim(prefix, "type", node.los_type_raw or None)
    builder.map_node_claim(prefix, tgt_prefix, "iscedCode", node.isced_code, slots)
    if node.eqf_level is not None:
        builder.map_node_claim(prefix, tgt_prefix, "level", str(node.eqf_level), slots)

    # the EDS side names a different language classification, so the slot
    # carries the display name and the original code is always recorded
    lang = node.language_of_instruction
    if lang is not None:
        if builder.node_slot("languageOfInstruction") is not None:
            builder.carry_node_claim(prefix, "languageOfInstruction", lang)
        builder.map_node_claim(prefix, tgt_prefix, "languageOfInstruction", lang, slots)

    grade = node.result.grade if node.result else None
    scheme = node.grading_scheme
    if scheme is not None:
        eds_scheme, eds_grade = map_grading_scheme(scheme, grade or "")
        if eds_scheme != "ECTS":
            builder.warnings.append(
                f"grading scheme {scheme!r} at {prefix} is not ECTS; passed through as {eds_scheme!r}")
        builder.map_node_claim(prefix, tgt_prefix, "gradingScheme", scheme, slots,
                               transformed=eds_scheme)
        if grade is not None:
            builder.map_node_claim(prefix, tgt_prefix, "result.resultLabel", grade, slots,
                                   transformed=eds_grade)
    elif grade is not None:
        builder.map_node_claim(prefix, tgt_prefix, "result.resultLabel", grade, slots,
                               transformed=grade)

    if node.result is not None:
        builder.carry_node_claim(prefix, "result.status", node.result.status)
        builder.carry_node_claim(prefix, "result.credit.scheme", node.result.credit_scheme)
        if node.result.credits is not None:
            builder.map_node_claim(prefix, tgt_prefix, "result.credit.value",
                                   _format_number(node.result.credits),
                                   slots, transformed=node.result.credits)

    for path, text in node.extras:
        builder.carry(f"{prefix}.{path}", text)

    subs: list[EdsAchievement] = []
    for j, kid in enumerate(node.children):
        kid_prefix = f"{prefix}.hasPart[{j}]"
        if recurse:
            subs.append(_build_achievement(builder, kid, kid_prefix,
                                           f"{tgt_prefix}.subAchievements[{j}]", recurse))
        else:
            # certificate template: descendant claims go to the extension block
            for path, text in opportunity_leaves(kid, kid_prefix):
                builder.carry(path, text)

    title = slots.get("title", "")
    if not title:
        raise UnmappableClaim(f"{prefix} has no title to populate the achievement", path=f"{prefix}.title")
    return EdsAchievement(
        title=title,
        isced_code=slots.get("iscedCode"),
        eqf_level=slots.get("eqfLevel"),
        language_of_instruction=slots.get("languageOfInstruction"),
        grading_scheme=slots.get("gradingScheme"),
        grade=slots.get("grade"),
        credits=slots.get("credits"),
        sub_achievements=tuple(subs),
    )


def credential_id_for(doc: ElmoDocument) -> str:
    return "urn:credential:" + hashlib.sha256(doc.raw_bytes).hexdigest()[:32]


def convert(doc: ElmoDocument, opts: ConversionOptions,
            registries: StandardsRegistries) -> ConversionReport:
    """Run the conversion pipeline on a validated document.

    The caller is expected to have run validate_elmo with no errors; the
    document type is detected unless opts carries an explicit override.
    """
    dt = opts.explicit_type_override or detect_document_type(doc)
    template = apply_overrides(select_template(dt), opts.mapping_overrides)
    builder = _Builder(template, registries)

    doc_slots: dict = {}
    learner = doc.learner
    doc_slots.update(builder.map_doc_claim("generatedDate", doc.generated_date))
    doc_slots.update(builder.map_doc_claim("learner.givenNames", learner.given_name))
    doc_slots.update(builder.map_doc_claim("learner.familyName", learner.family_name))
    doc_slots.update(builder.map_doc_claim("learner.citizenship", learner.citizenship))
    doc_slots.update(builder.map_doc_claim(
        "learner.gender", str(learner.gender) if learner.gender is not None else None))

    # generatedDate is re-issued as issuanceDate; the original is retained.
    builder.carry("generatedDate", doc.generated_date)
    doc_slots.update(builder.map_doc_claim("learner.bday", learner.birth_date))
    for i, (scheme, value) in enumerate(learner.identifiers):
        builder.carry(f"learner.identifiers[{i}].type", scheme)
        builder.carry(f"learner.identifiers[{i}]", value)
    if learner.current_address is not None:
        addr = learner.current_address
        for i, line in enumerate(addr.lines):
            builder.carry(f"learner.currentAddress.addressLine[{i}]", line)
        for name, value in (("postalCode", addr.postal_code), ("locality", addr.locality),
                            ("country", addr.country)):
            builder.carry_node_claim("learner.currentAddress", name, value)
    for path, text in learner.extras:
        builder.carry(f"learner.{path}", text)

    issuer = doc.issuer
    builder.carry("issuer.country", issuer.country)
    builder.carry("issuer.title", issuer.title)
    builder.carry_node_claim("issuer", "title.lang", issuer.title_lang)
    builder.carry_node_claim("issuer", "url", issuer.url)
    for i, (scheme, value) in enumerate(issuer.identifiers):
        builder.carry(f"issuer.identifiers[{i}].type", scheme)
        builder.carry(f"issuer.identifiers[{i}]", value)
    if issuer.current_address is not None:
        addr = issuer.current_address
        for i, line in enumerate(addr.lines):
            builder.carry(f"issuer.currentAddress.addressLine[{i}]", line)
        for name, value in (("postalCode", addr.postal_code), ("locality", addr.locality),
                            ("country", addr.country)):
            builder.carry_node_claim("issuer.currentAddress", name, value)
    for path, text in issuer.extras:
        builder.carry(f"issuer.{path}", text)

    achievements = tuple(
        _build_achievement(builder, report, f"reports[{i}]",
                           f"credentialSubject.achievements[{i}]", template.recurse_achievements)
        for i, report in enumerate(doc.reports))

    for i, att in enumerate(doc.attachments):
        builder.carry(f"attachments[{i}].type", att.type_label)
        builder.carry(f"attachments[{i}].mimeType", att.mime_type)
        if att.content_b64:
            builder.carry(f"attachments[{i}].content", att.content_b64)
    for path, text in doc.extras:
        builder.carry(path, text)

    if len(learner.identifiers) > 1:
        builder.warnings.append(
            f"learner carries {len(learner.identifiers)} identifiers; all kept in the extension block")

    subject = EdsSubject(
        id=Did.parse(HOLDER_PLACEHOLDER_DID),
        given_name=doc_slots.get("credentialSubject.givenName", ""),
        family_name=doc_slots.get("credentialSubject.familyName", ""),
        citizenship=doc_slots.get("credentialSubject.citizenship"),
        gender=doc_slots.get("credentialSubject.gender"),
        achievements=achievements,
    )
    issuance = doc_slots.get("issuanceDate", "")
    credential = EdsCredential(
        contexts=(CREDENTIALS_CONTEXT,),
        id=credential_id_for(doc),
        types=BASE_TYPES + (dt.value,),
        issuer=Did.parse(ISSUER_PLACEHOLDER_DID),
        issuance_date=issuance,
        credential_subject=subject,
        credential_schema=(opts.schema_id, SCHEMA_REF_TYPE),
        extension=dict(builder.carried),
        proof=ProofBlock(proof_type=PROOF_TYPE_JWS, created=issuance,
                         verification_method="", jws=""),
    )
    credential = insert_placeholders(credential, opts)
    _check_required(credential, template.required_targets)
    check_invariants(credential)
    return ConversionReport(
        credential=credential,
        carried_extensions=tuple(builder.carried),
        warnings=tuple(builder.warnings),
        mapped_claims=tuple(builder.trace),
    )


def _check_required(cred: EdsCredential, required: tuple[str, ...]) -> None:
    subject = cred.credential_subject
    values = {
        "issuer": str(cred.issuer),
        "issuanceDate": cred.issuance_date,
        "credentialSubject.id": str(subject.id),
        "credentialSubject.givenName": subject.given_name,
        "credentialSubject.familyName": subject.family_name,
        "credentialSubject.achievements[0].title":
            subject.achievements[0].title if subject.achievements else "",
    }
    for target in required:
        if not values.get(target):
            raise UnmappableClaim(f"required target {target} could not be populated", path=target)


def insert_placeholders(cred: EdsCredential, opts: ConversionOptions) -> EdsCredential:
    """Fill the DID and signature slots for the chosen mode; idempotent.

    Placeholder mode sets the sentinel DIDs and the literal proof
    placeholder; signing mode substitutes the operator-supplied DIDs and
    leaves the proof untouched for the signing step.
    """
    subject = cred.credential_subject
    if opts.mode == ConversionMode.SIGNING:
        return replace(cred,
                       issuer=opts.issuer_did,
                       credential_subject=replace(subject, id=opts.holder_did))
    proof = replace(cred.proof,
                    created=cred.proof.created or cred.issuance_date,
                    verification_method=f"{ISSUER_PLACEHOLDER_DID}#keys-1",
                    jws=JWS_PLACEHOLDER)
    return replace(cred,
                   issuer=Did.parse(ISSUER_PLACEHOLDER_DID),
                   credential_subject=replace(subject, id=Did.parse(HOLDER_PLACEHOLDER_DID)),
                   proof=proof)
