"""EBSI-diploma-schema credential model and canonical JSON-LD serialization.

Canonical form
--------------
``serialize_jsonld`` emits UTF-8 JSON with no insignificant whitespace and a
fixed member order, so that structurally equal credentials serialize to
byte-identical output (a JWS is computed over these bytes):

* top level: ``@context``, ``id``, ``type``, ``issuer``, ``issuanceDate``,
  ``credentialSubject``, ``credentialSchema``, ``extension``, ``proof``
* credentialSubject: ``id``, ``givenName``, ``familyName``, ``citizenship``,
  ``gender``, ``achievements`` (optional members omitted when absent)
* achievement: ``title``, ``iscedCode``, ``eqfLevel``,
  ``languageOfInstruction``, ``gradingScheme``, ``grade``, ``credits``,
  ``subAchievements`` (omitted when empty)
* credentialSchema: ``id``, ``type``; proof: ``type``, ``created``,
  ``verificationMethod``, ``jws``
* ``extension`` holds carried-over source claims keyed by their source
  path, keys emitted in sorted order; always present, possibly empty.

Integral ``credits`` values are emitted without a decimal point.  Output
carries no trailing newline and no byte-order mark.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from typing import Any, Mapping, Optional

from .errors import InvariantViolation, MalformedJson, SchemaViolation

CREDENTIALS_CONTEXT = "https://www.w3.org/2018/credentials/v1"
BASE_TYPES = ("VerifiableCredential", "VerifiableAttestation")

JWS_PLACEHOLDER = "PLACEHOLDER"
HOLDER_PLACEHOLDER_DID = "did:ebsi:xyz-holder"
ISSUER_PLACEHOLDER_DID = "did:ebsi:xyz-issuer"

# Default schema reference; a real trusted-schema-registry id can be
# injected via configuration.
SCHEMA_PLACEHOLDER_ID = "https://example.ebsi.eu/trusted-schemas-registry/v2/schemas/diploma-placeholder"
SCHEMA_REF_TYPE = "FullJsonSchemaValidator2021"

PROOF_TYPE_JWS = "JsonWebSignature2020"

_DID_RE = re.compile(r"^did:([a-z0-9]+):(.+)$")
_B64URL_SEGMENT = re.compile(r"^[A-Za-z0-9_-]*$")
_TIMESTAMP_RE = re.compile(r"^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}")


@dataclass(frozen=True)
class Did:
    method: str
    identifier: str

    def __str__(self) -> str:
        return f"did:{self.method}:{self.identifier}"

    @classmethod
    def parse(cls, text: str) -> "Did":
        m = _DID_RE.match(text)
        if not m:
            raise InvariantViolation(f"{text!r} is not a did:<method>:<identifier> URI")
        return cls(method=m.group(1), identifier=m.group(2))


@dataclass(frozen=True)
class ProofBlock:
    proof_type: str = PROOF_TYPE_JWS
    created: str = ""
    verification_method: str = ""
    jws: str = JWS_PLACEHOLDER


@dataclass(frozen=True)
class EdsAchievement:
    title: str
    isced_code: Optional[str] = None
    eqf_level: Optional[int] = None
    language_of_instruction: Optional[str] = None
    grading_scheme: Optional[str] = None
    grade: Optional[str] = None
    credits: Optional[float] = None
    sub_achievements: tuple["EdsAchievement", ...] = ()


@dataclass(frozen=True)
class EdsSubject:
    id: Did
    given_name: str
    family_name: str
    citizenship: Optional[str] = None
    gender: Optional[str] = None
    achievements: tuple[EdsAchievement, ...] = ()


@dataclass(frozen=True)
class EdsCredential:
    contexts: tuple[str, ...]
    id: str
    types: tuple[str, ...]
    issuer: Did
    issuance_date: str
    credential_subject: EdsSubject
    credential_schema: tuple[str, str] = (SCHEMA_PLACEHOLDER_ID, SCHEMA_REF_TYPE)
    extension: Mapping[str, str] = field(default_factory=dict)
    proof: ProofBlock = field(default_factory=ProofBlock)


def is_compact_jws(value: str) -> bool:
    """True for a 3-segment compact JWS (detached payloads leave the middle
    segment empty)."""
    parts = value.split(".")
    return (len(parts) == 3 and parts[0] != "" and parts[2] != ""
            and all(_B64URL_SEGMENT.match(p) for p in parts))


def check_invariants(cred: EdsCredential) -> None:
    """Raise InvariantViolation unless the credential is serializable.

    An empty proof.jws is tolerated: it is the transient
    pending-signature state that signing itself serializes.
    """
    if not cred.contexts or cred.contexts[0] != CREDENTIALS_CONTEXT:
        raise InvariantViolation("first context must be the W3C credentials context", path="@context")
    if len(cred.types) < 3 or tuple(cred.types[:2]) != BASE_TYPES:
        raise InvariantViolation(
            f"types must start with {BASE_TYPES} and end with the document-type label", path="type")
    if not cred.id:
        raise InvariantViolation("credential id is empty", path="id")
    if not _TIMESTAMP_RE.match(cred.issuance_date):
        raise InvariantViolation(f"issuanceDate {cred.issuance_date!r} is not ISO 8601", path="issuanceDate")
    if not cred.credential_schema[0]:
        raise InvariantViolation("credentialSchema.id is empty", path="credentialSchema.id")
    for k, v in cred.extension.items():
        if not isinstance(k, str) or not isinstance(v, str):
            raise InvariantViolation("extension entries must map text to text", path=f"extension.{k}")
    jws = cred.proof.jws
    if jws not in (JWS_PLACEHOLDER, "") and not is_compact_jws(jws):
        raise InvariantViolation("proof.jws is neither the placeholder sentinel nor a compact JWS",
                                 path="proof.jws")


def _number(value: float):
    return int(value) if value == int(value) else value


def _achievement_jsonable(a: EdsAchievement) -> dict:
    out: dict[str, Any] = {"title": a.title}
    if a.isced_code is not None:
        out["iscedCode"] = a.isced_code
    if a.eqf_level is not None:
        out["eqfLevel"] = a.eqf_level
    if a.language_of_instruction is not None:
        out["languageOfInstruction"] = a.language_of_instruction
    if a.grading_scheme is not None:
        out["gradingScheme"] = a.grading_scheme
    if a.grade is not None:
        out["grade"] = a.grade
    if a.credits is not None:
        out["credits"] = _number(a.credits)
    if a.sub_achievements:
        out["subAchievements"] = [_achievement_jsonable(s) for s in a.sub_achievements]
    return out


def to_jsonable(cred: EdsCredential) -> dict:
    """Credential as a JSON-ready dict in canonical member order."""
    subject = cred.credential_subject
    subj: dict[str, Any] = {
        "id": str(subject.id),
        "givenName": subject.given_name,
        "familyName": subject.family_name,
    }
    if subject.citizenship is not None:
        subj["citizenship"] = subject.citizenship
    if subject.gender is not None:
        subj["gender"] = subject.gender
    subj["achievements"] = [_achievement_jsonable(a) for a in subject.achievements]
    return {
        "@context": list(cred.contexts),
        "id": cred.id,
        "type": list(cred.types),
        "issuer": str(cred.issuer),
        "issuanceDate": cred.issuance_date,
        "credentialSubject": subj,
        "credentialSchema": {"id": cred.credential_schema[0], "type": cred.credential_schema[1]},
        "extension": {k: cred.extension[k] for k in sorted(cred.extension)},
        "proof": {
            "type": cred.proof.proof_type,
            "created": cred.proof.created,
            "verificationMethod": cred.proof.verification_method,
            "jws": cred.proof.jws,
        },
    }


def serialize_jsonld(cred: EdsCredential) -> bytes:
    check_invariants(cred)
    return json.dumps(to_jsonable(cred), ensure_ascii=False, separators=(",", ":")).encode("utf-8")


def signing_payload(cred: EdsCredential) -> bytes:
    """Canonical bytes of the credential with proof.jws emptied (the JWS
    detached payload)."""
    return serialize_jsonld(replace(cred, proof=replace(cred.proof, jws="")))


def _require(obj: dict, member: str, kind, path: str = ""):
    where = f"{path}.{member}" if path else member
    if member not in obj:
        raise SchemaViolation(f"missing mandatory member {where}", path=where)
    value = obj[member]
    if not isinstance(value, kind):
        raise SchemaViolation(f"member {where} has wrong type", path=where)
    return value


def _parse_achievement(obj: dict, path: str) -> EdsAchievement:
    title = _require(obj, "title", str, path)
    credits = obj.get("credits")
    if credits is not None and not isinstance(credits, (int, float)):
        raise SchemaViolation("credits must be a number", path=f"{path}.credits")
    subs = obj.get("subAchievements", [])
    if not isinstance(subs, list):
        raise SchemaViolation("subAchievements must be an array", path=f"{path}.subAchievements")
    eqf = obj.get("eqfLevel")
    if eqf is not None and not isinstance(eqf, int):
        raise SchemaViolation("eqfLevel must be an integer", path=f"{path}.eqfLevel")
    return EdsAchievement(
        title=title,
        isced_code=obj.get("iscedCode"),
        eqf_level=eqf,
        language_of_instruction=obj.get("languageOfInstruction"),
        grading_scheme=obj.get("gradingScheme"),
        grade=obj.get("grade"),
        credits=float(credits) if credits is not None else None,
        sub_achievements=tuple(_parse_achievement(s, f"{path}.subAchievements[{i}]")
                               for i, s in enumerate(subs)),
    )


_KNOWN_TOP = {"@context", "id", "type", "issuer", "issuanceDate", "credentialSubject",
              "credentialSchema", "extension", "proof"}
_KNOWN_SUBJECT = {"id", "givenName", "familyName", "citizenship", "gender", "achievements"}


def _stringify(value: Any) -> str:
    return value if isinstance(value, str) else json.dumps(value, ensure_ascii=False, separators=(",", ":"))


def parse_eds(data: bytes) -> EdsCredential:
    """Parse canonical (or hand-written) EDS JSON-LD bytes.

    Inverse of serialize_jsonld on its image.  Unknown top-level and
    credentialSubject members are preserved in the extension map, non-text
    values as their canonical JSON encoding.
    """
    try:
        obj = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedJson(f"not valid UTF-8 JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise SchemaViolation("top-level JSON value must be an object")

    contexts = _require(obj, "@context", list)
    types = _require(obj, "type", list)
    issuer = Did.parse(_require(obj, "issuer", str))
    issuance = _require(obj, "issuanceDate", str)
    cred_id = _require(obj, "id", str)
    subj_obj = _require(obj, "credentialSubject", dict)
    schema_obj = _require(obj, "credentialSchema", dict)
    proof_obj = _require(obj, "proof", dict)

    extension: dict[str, str] = {}
    if "extension" in obj:
        for k, v in _require(obj, "extension", dict).items():
            extension[k] = _stringify(v)
    for k in obj:
        if k not in _KNOWN_TOP:
            extension[k] = _stringify(obj[k])
    for k in subj_obj:
        if k not in _KNOWN_SUBJECT:
            extension[f"credentialSubject.{k}"] = _stringify(subj_obj[k])

    achievements_raw = subj_obj.get("achievements", [])
    if not isinstance(achievements_raw, list):
        raise SchemaViolation("achievements must be an array", path="credentialSubject.achievements")
    subject = EdsSubject(
        id=Did.parse(_require(subj_obj, "id", str, "credentialSubject")),
        given_name=_require(subj_obj, "givenName", str, "credentialSubject"),
        family_name=_require(subj_obj, "familyName", str, "credentialSubject"),
        citizenship=subj_obj.get("citizenship"),
        gender=subj_obj.get("gender"),
        achievements=tuple(_parse_achievement(a, f"credentialSubject.achievements[{i}]")
                           for i, a in enumerate(achievements_raw)),
    )
    proof = ProofBlock(
        proof_type=proof_obj.get("type", PROOF_TYPE_JWS),
        created=proof_obj.get("created", ""),
        verification_method=proof_obj.get("verificationMethod", ""),
        jws=proof_obj.get("jws", JWS_PLACEHOLDER),
    )
    cred = EdsCredential(
        contexts=tuple(str(c) for c in contexts),
        id=cred_id,
        types=tuple(str(t) for t in types),
        issuer=issuer,
        issuance_date=issuance,
        credential_subject=subject,
        credential_schema=(_require(schema_obj, "id", str, "credentialSchema"),
                           schema_obj.get("type", SCHEMA_REF_TYPE)),
        extension=extension,
        proof=proof,
    )
    check_invariants(cred)
    return cred
