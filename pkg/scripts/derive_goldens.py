"""Derive the golden expectation files under fixtures/golden/.

The four conversion goldens are hand-transcribed here from the documented
mapping table (see the transform module docstring): every value below was
read off the fixture XML and placed by hand, so the files are an
implementation-independent statement of what the converter must emit.
The signing golden (payload + compact JWS) and DID goldens come from the
pure-Python oracle in pure_crypto.py; the only use of the cryptography
library here is reading key files.

Canonical serialization rules used (as documented): fixed member order,
sorted extension keys, compact separators, UTF-8, no trailing newline.
"""

import base64
import hashlib
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))
import pure_crypto as pc  # noqa: E402

from cryptography.hazmat.primitives import serialization  # noqa: E402

ROOT = Path(__file__).resolve().parents[1]
ELMO = ROOT / "fixtures" / "elmo"
KEYS = ROOT / "fixtures" / "keys"
GOLDEN = ROOT / "fixtures" / "golden"

CONTEXT = "https://www.w3.org/2018/credentials/v1"
SCHEMA = {"id": "https://example.ebsi.eu/trusted-schemas-registry/v2/schemas/diploma-placeholder",
          "type": "FullJsonSchemaValidator2021"}
ISSUER_SENTINEL = "did:ebsi:xyz-issuer"
HOLDER_SENTINEL = "did:ebsi:xyz-holder"
JWS_HEADER = b'{"alg":"ES256K","b64":false,"crit":["b64"]}'


def b64url(data: bytes) -> str:
    return base64.urlsafe_b64encode(data).rstrip(b"=").decode()


def credential_id(fixture: Path) -> str:
    return "urn:credential:" + hashlib.sha256(fixture.read_bytes()).hexdigest()[:32]


def placeholder_proof(created: str) -> dict:
    return {"type": "JsonWebSignature2020", "created": created,
            "verificationMethod": f"{ISSUER_SENTINEL}#keys-1", "jws": "PLACEHOLDER"}


def credential(fixture: str, doc_type: str, issuance: str, subject: dict, extension: dict) -> dict:
    return {
        "@context": [CONTEXT],
        "id": credential_id(ELMO / fixture),
        "type": ["VerifiableCredential", "VerifiableAttestation", doc_type],
        "issuer": ISSUER_SENTINEL,
        "issuanceDate": issuance,
        "credentialSubject": subject,
        "credentialSchema": dict(SCHEMA),
        "extension": dict(sorted(extension.items())),
        "proof": placeholder_proof(issuance),
    }


def dump(path: Path, obj: dict) -> None:
    path.write_bytes(json.dumps(obj, ensure_ascii=False, separators=(",", ":")).encode("utf-8"))
    print(f"wrote {path}")


# --- transcript_sweden ------------------------------------------------------

SWEDEN_SUBJECT = {
    "id": HOLDER_SENTINEL,
    "givenName": "Anna Maria",
    "familyName": "Svensson",
    "citizenship": "SE",
    "gender": "female",
    "achievements": [{
        "title": "Bachelor Programme in Mathematics",
        "iscedCode": "0541",
        "eqfLevel": 6,
        "languageOfInstruction": "English",
        "subAchievements": [
            {"title": "Linear Algebra II", "gradingScheme": "ECTS", "grade": "B", "credits": 7.5},
            {"title": "Real Analysis", "gradingScheme": "ECTS", "grade": "A", "credits": 7.5},
            {"title": "Probability Theory", "gradingScheme": "ECTS", "grade": "C", "credits": 15},
        ],
    }],
}

SWEDEN_EXTENSION = {
    "generatedDate": "2022-06-03T10:30:00+02:00",
    "issuer.country": "SE",
    "issuer.identifiers[0]": "uu.se",
    "issuer.identifiers[0].type": "schac",
    "issuer.identifiers[1]": "S UPPSALA01",
    "issuer.identifiers[1].type": "erasmus",
    "issuer.title": "Uppsala University",
    "issuer.title.lang": "en",
    "issuer.url": "https://www.uu.se",
    "learner.bday": "1997-04-12",
    "learner.identifiers[0]": "19970412-2381",
    "learner.identifiers[0].type": "nationalIdentifier",
    "report[0].issueDate": "2022-06-01",
    "reports[0].languageOfInstruction": "en",
    "reports[0].hasPart[0].result.credit.scheme": "ECTS",
    "reports[0].hasPart[0].result.status": "passed",
    "reports[0].hasPart[0].title.lang": "en",
    "reports[0].hasPart[0].type": "Course",
    "reports[0].hasPart[1].result.credit.scheme": "ECTS",
    "reports[0].hasPart[1].result.status": "passed",
    "reports[0].hasPart[1].title.lang": "en",
    "reports[0].hasPart[1].type": "Course",
    "reports[0].hasPart[2].result.credit.scheme": "ECTS",
    "reports[0].hasPart[2].result.status": "passed",
    "reports[0].hasPart[2].title.lang": "en",
    "reports[0].hasPart[2].type": "Course",
    "reports[0].title.lang": "en",
    "reports[0].type": "Degree Programme",
}

# --- transcript_norway ------------------------------------------------------

NORWAY_SUBJECT = {
    "id": HOLDER_SENTINEL,
    "givenName": "Ola",
    "familyName": "Nordmann",
    "citizenship": "NO",
    "achievements": [{
        "title": "Master of Science in Informatics",
        "iscedCode": "0613",
        "eqfLevel": 7,
        "languageOfInstruction": "Norwegian Bokmål",
        "subAchievements": [
            {"title": "Algorithms Specialization", "subAchievements": [
                {"title": "Advanced Algorithms", "gradingScheme": "ECTS", "grade": "A", "credits": 10},
                {"title": "Graph Mining Seminar", "gradingScheme": "local:no-bestatt",
                 "grade": "bestått", "credits": 7.5},
            ]},
            {"title": "Master Thesis", "gradingScheme": "ECTS", "credits": 30},
        ],
    }],
}

NORWAY_EXTENSION = {
    "attachments[0].content": "RGlwbG9tYSBTdXBwbGVtZW50IGRyYWZ0",
    "attachments[0].mimeType": "text/plain",
    "attachments[0].type": "diploma supplement",
    "generatedDate": "2021-12-20T16:45:30+01:00",
    "issuer.country": "NO",
    "issuer.identifiers[0]": "ntnu.no",
    "issuer.identifiers[0].type": "schac",
    "issuer.title": "Norwegian University of Science and Technology",
    "issuer.title.lang": "en",
    "issuer.url": "https://www.ntnu.no",
    "learner.bday": "1999-01-20",
    "learner.currentAddress.addressLine[0]": "Høgskoleringen 1",
    "learner.currentAddress.country": "NO",
    "learner.currentAddress.locality": "Trondheim",
    "learner.currentAddress.postalCode": "7034",
    "learner.identifiers[0]": "200199-55018",
    "learner.identifiers[0].type": "nationalIdentifier",
    "learner.identifiers[1]": "urn:schac:personalUniqueCode:int:esi:ntnu.no:998877",
    "learner.identifiers[1].type": "europeanStudentIdentifier",
    "reports[0].languageOfInstruction": "nb",
    "reports[0].hasPart[0].hasPart[0].result.credit.scheme": "ECTS",
    "reports[0].hasPart[0].hasPart[0].result.status": "passed",
    "reports[0].hasPart[0].hasPart[0].title.lang": "en",
    "reports[0].hasPart[0].hasPart[0].type": "Course",
    "reports[0].hasPart[0].hasPart[1].result.credit.scheme": "ECTS",
    "reports[0].hasPart[0].hasPart[1].result.status": "passed",
    "reports[0].hasPart[0].hasPart[1].title.lang": "en",
    "reports[0].hasPart[0].hasPart[1].type": "Course",
    "reports[0].hasPart[0].title.lang": "en",
    "reports[0].hasPart[0].type": "Module",
    "reports[0].hasPart[1].result.credit.scheme": "ECTS",
    "reports[0].hasPart[1].result.status": "inProgress",
    "reports[0].hasPart[1].title.lang": "en",
    "reports[0].hasPart[1].type": "Course",
    "reports[0].title.lang": "en",
    "reports[0].type": "Degree Programme",
}

# --- certificate_germany ----------------------------------------------------

GERMANY_SUBJECT = {
    "id": HOLDER_SENTINEL,
    "givenName": "Jonas",
    "familyName": "Weber",
    "citizenship": "DE",
    "gender": "male",
    "achievements": [{
        "title": "Zeugnis der Allgemeinen Hochschulreife",
        "eqfLevel": 4,
        "languageOfInstruction": "German",
        "gradingScheme": "local:de-1-6",
        "grade": "1.8",
    }],
}

GERMANY_EXTENSION = {
    "generatedDate": "2022-07-01T09:00:00Z",
    "issuer.country": "DE",
    "issuer.identifiers[0]": "gymnasium-neukoelln.berlin.de",
    "issuer.identifiers[0].type": "schac",
    "issuer.levelEQF": "4",
    "issuer.title": "Gymnasium Neukölln",
    "issuer.title.lang": "de",
    "learner.bday": "2003-11-02",
    "learner.identifiers[0]": "DE-8812-4451",
    "learner.identifiers[0].type": "nationalIdentifier",
    "reports[0].languageOfInstruction": "de",
    "reports[0].result.status": "passed",
    "reports[0].title.lang": "de",
    "reports[0].type": "Diploma",
}

# --- certificate_finland ----------------------------------------------------

FINLAND_SUBJECT = {
    "id": HOLDER_SENTINEL,
    "givenName": "Aino",
    "familyName": "Korhonen",
    "citizenship": "FI",
    "achievements": [{
        "title": "Ylioppilastutkinto",
        "languageOfInstruction": "Finnish",
    }],
}

FINLAND_EXTENSION = {
    "generatedDate": "2023-05-31T12:00:00+03:00",
    "issuer.country": "FI",
    "issuer.identifiers[0]": "helsinki-lukio-042",
    "issuer.identifiers[0].type": "other",
    "issuer.title": "Helsingin luonnontiedelukio",
    "issuer.title.lang": "fi",
    "reports[0].languageOfInstruction": "fi",
    "reports[0].title.lang": "fi",
    "reports[0].type": "Diploma",
}


def read_ec_key(path: Path):
    key = serialization.load_pem_private_key(path.read_bytes(), password=None)
    compressed = key.public_key().public_bytes(
        serialization.Encoding.X962, serialization.PublicFormat.CompressedPoint)
    return key.private_numbers().private_value, compressed


def main() -> int:
    GOLDEN.mkdir(parents=True, exist_ok=True)

    goldens = {
        "transcript_sweden": credential("transcript_sweden.xml", "TranscriptOfRecords",
                                        "2022-06-03T08:30:00Z", SWEDEN_SUBJECT, SWEDEN_EXTENSION),
        "transcript_norway": credential("transcript_norway.xml", "TranscriptOfRecords",
                                        "2021-12-20T15:45:30Z", NORWAY_SUBJECT, NORWAY_EXTENSION),
        "certificate_germany": credential("certificate_germany.xml", "UpperSecondarySchoolCertificate",
                                          "2022-07-01T09:00:00Z", GERMANY_SUBJECT, GERMANY_EXTENSION),
        "certificate_finland": credential("certificate_finland.xml", "UpperSecondarySchoolCertificate",
                                          "2023-05-31T09:00:00Z", FINLAND_SUBJECT, FINLAND_EXTENSION),
    }
    for stem, obj in goldens.items():
        dump(GOLDEN / f"{stem}.jsonld", obj)

    # signing golden: the Sweden transcript in signing mode, issuer/holder
    # DIDs derived (oracle-side) from the checked-in test keys, signed with
    # the deterministic nonce so two independent RFC 6979 implementations
    # must agree bit for bit.
    issuer_priv, issuer_pub = read_ec_key(KEYS / "issuer_ec.pem")
    _, holder_pub = read_ec_key(KEYS / "holder_ec.pem")
    issuer_did = pc.derive_did_oracle(issuer_pub)
    holder_did = pc.derive_did_oracle(holder_pub)

    signing = credential("transcript_sweden.xml", "TranscriptOfRecords",
                         "2022-06-03T08:30:00Z", dict(SWEDEN_SUBJECT, id=holder_did),
                         SWEDEN_EXTENSION)
    signing["issuer"] = issuer_did
    signing["proof"] = {"type": "JsonWebSignature2020", "created": "2022-06-03T08:30:00Z",
                        "verificationMethod": f"{issuer_did}#keys-1", "jws": ""}
    payload = json.dumps(signing, ensure_ascii=False, separators=(",", ":")).encode("utf-8")
    (GOLDEN / "transcript_sweden_signing_payload.bin").write_bytes(payload)
    print(f"wrote {GOLDEN / 'transcript_sweden_signing_payload.bin'}")

    signing_input = b64url(JWS_HEADER).encode() + b"." + payload
    h1 = hashlib.sha256(signing_input).digest()
    r, s = pc.ecdsa_sign_deterministic(issuer_priv, h1)
    jws = f"{b64url(JWS_HEADER)}..{b64url(r.to_bytes(32, 'big') + s.to_bytes(32, 'big'))}"
    (GOLDEN / "transcript_sweden_jws.txt").write_text(jws + "\n")
    print(f"wrote {GOLDEN / 'transcript_sweden_jws.txt'}")

    # DID goldens
    k1 = json.loads((KEYS / "k1.jwk").read_text())
    x = base64.urlsafe_b64decode(k1["x"] + "==")
    y = base64.urlsafe_b64decode(k1["y"] + "==")
    prefix = bytes([2 if int.from_bytes(y, "big") % 2 == 0 else 3])
    k1_compressed = prefix + x
    (GOLDEN / "did_k1.txt").write_text(pc.derive_did_oracle(k1_compressed) + "\n")
    (GOLDEN / "did_issuer_ec.txt").write_text(issuer_did + "\n")
    (GOLDEN / "did_holder_ec.txt").write_text(holder_did + "\n")
    print(f"wrote {GOLDEN}/did_*.txt")
    return 0


if __name__ == "__main__":
    sys.exit(main())
