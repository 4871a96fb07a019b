"""Signature handling on both sides of the conversion.

Inbound (ELMO): enveloped XML-DSig with an X.509 certificate, RSA-SHA256.
Verification uses a constrained canonicalization profile -- the enveloped
Signature element (last child of the root) is excised from the raw bytes
and line endings are normalized to LF before digesting; no further XML
canonicalization is applied.  Fixtures are produced under the same profile
by sign_elmo_xml, so the check is self-consistent; this is a documented
conformance limitation, not a general-purpose XML-DSig implementation.

Outbound (EDS): detached compact JWS over secp256k1 (ES256K) with the
RFC 7797 unencoded payload option.  The fixed protected header is
``{"alg":"ES256K","b64":false,"crit":["b64"]}``; the payload is the
canonical credential serialization with ``proof.jws`` emptied, and the
serialized form is ``<b64url(header)>..<b64url(signature)>`` with the raw
64-byte R||S signature.  Deterministic (RFC 6979) signing is available for
reproducible golden outputs; by default signing is randomized.

DIDs are derived from public key bytes: ``did:<method>:z<base58(SHA-256(key))>``.
"""

from __future__ import annotations

import base64
import hashlib
import json
import re
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Optional

from cryptography import x509
from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives import hashes, serialization
from cryptography.hazmat.primitives.asymmetric import ec, padding, rsa
from cryptography.hazmat.primitives.asymmetric.utils import (
    decode_dss_signature,
    encode_dss_signature,
)

from .eds import JWS_PLACEHOLDER, PROOF_TYPE_JWS, Did, EdsCredential, ProofBlock, serialize_jsonld, signing_payload
from .elmo import ElmoDocument
from .errors import (
    InvalidKey,
    InvariantViolation,
    MissingSignature,
    PlaceholderProof,
    UnknownVerificationMethod,
    UnsignedCredential,
)

SCHEME_EC_SECP256K1 = "EcSecp256k1"
SCHEME_RSA_SHA256 = "RsaSha256"

XMLDSIG_DIGEST_SHA256 = "http://www.w3.org/2001/04/xmlenc#sha256"
XMLDSIG_SIG_RSA_SHA256 = "http://www.w3.org/2001/04/xmldsig-more#rsa-sha256"

JWS_PROTECTED_HEADER = b'{"alg":"ES256K","b64":false,"crit":["b64"]}'

_B58_ALPHABET = "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz"

_SIGNATURE_RE = re.compile(rb"<(?:[A-Za-z0-9._-]+:)?Signature[\s>].*?</(?:[A-Za-z0-9._-]+:)?Signature>",
                           re.DOTALL)
_SIGNED_INFO_RE = re.compile(rb"<(?:[A-Za-z0-9._-]+:)?SignedInfo[\s>].*?</(?:[A-Za-z0-9._-]+:)?SignedInfo>",
                             re.DOTALL)


class VerificationResult(Enum):
    VALID = "Valid"
    DIGEST_MISMATCH = "DigestMismatch"
    SIGNATURE_INVALID = "SignatureInvalid"
    UNTRUSTED_CERTIFICATE = "UntrustedCertificate"
    UNSUPPORTED_ALGORITHM = "UnsupportedAlgorithm"


@dataclass(frozen=True)
class KeyPair:
    scheme: str  # EcSecp256k1 | RsaSha256
    public: bytes  # EC: SEC1 compressed point; RSA: DER SubjectPublicKeyInfo
    private: bytes = b""  # EC: 32-byte big-endian scalar; RSA: DER PKCS8

    def __repr__(self) -> str:  # never leak private material into logs
        return f"KeyPair(scheme={self.scheme!r}, public={self.public.hex()[:16]}..., private=<hidden>)"


@dataclass(frozen=True)
class VerifiablePresentation:
    credential: EdsCredential
    holder: Did
    nonce: str
    proof: ProofBlock


def base58_encode(data: bytes) -> str:
    num = int.from_bytes(data, "big")
    out = ""
    while num:
        num, rem = divmod(num, 58)
        out = _B58_ALPHABET[rem] + out
    pad = 0
    for byte in data:
        if byte == 0:
            pad += 1
        else:
            break
    return "1" * pad + out


def derive_did(public_key: bytes, method: str = "ebsi") -> Did:
    """Deterministic DID for a public key: z-prefixed base58 of its
    SHA-256 hash."""
    if not public_key:
        raise InvalidKey("cannot derive a DID from an empty public key")
    digest = hashlib.sha256(public_key).digest()
    return Did(method=method, identifier="z" + base58_encode(digest))


# ---------------------------------------------------------------------------
# key material
# ---------------------------------------------------------------------------

def generate_ec_keypair() -> KeyPair:
    key = ec.generate_private_key(ec.SECP256K1())
    return _keypair_from_ec(key)


def _keypair_from_ec(key: ec.EllipticCurvePrivateKey) -> KeyPair:
    private = key.private_numbers().private_value.to_bytes(32, "big")
    public = key.public_key().public_bytes(
        serialization.Encoding.X962, serialization.PublicFormat.CompressedPoint)
    return KeyPair(scheme=SCHEME_EC_SECP256K1, public=public, private=private)


def _ec_private_key(pair: KeyPair) -> ec.EllipticCurvePrivateKey:
    if pair.scheme != SCHEME_EC_SECP256K1 or not pair.private:
        raise InvalidKey(f"need an {SCHEME_EC_SECP256K1} private key")
    try:
        return ec.derive_private_key(int.from_bytes(pair.private, "big"), ec.SECP256K1())
    except ValueError as exc:
        raise InvalidKey(f"bad secp256k1 private scalar: {exc}") from None


def ec_public_key_from_bytes(data: bytes) -> ec.EllipticCurvePublicKey:
    try:
        return ec.EllipticCurvePublicKey.from_encoded_point(ec.SECP256K1(), data)
    except ValueError as exc:
        raise InvalidKey(f"bad secp256k1 public point: {exc}") from None


def _b64url(data: bytes) -> str:
    return base64.urlsafe_b64encode(data).rstrip(b"=").decode("ascii")


def _b64url_decode(text: str) -> bytes:
    return base64.urlsafe_b64decode(text + "=" * (-len(text) % 4))


def keypair_from_pem(data: bytes) -> KeyPair:
    """Load an EC secp256k1 or RSA key pair from (unencrypted) PEM."""
    try:
        key = serialization.load_pem_private_key(data, password=None)
    except ValueError:
        key = None
    if key is None:
        try:
            pub = serialization.load_pem_public_key(data)
        except ValueError as exc:
            raise InvalidKey(f"not a readable PEM key: {exc}") from None
        if isinstance(pub, ec.EllipticCurvePublicKey):
            return KeyPair(SCHEME_EC_SECP256K1, pub.public_bytes(
                serialization.Encoding.X962, serialization.PublicFormat.CompressedPoint))
        if isinstance(pub, rsa.RSAPublicKey):
            return KeyPair(SCHEME_RSA_SHA256, pub.public_bytes(
                serialization.Encoding.DER, serialization.PublicFormat.SubjectPublicKeyInfo))
        raise InvalidKey(f"unsupported public key type {type(pub).__name__}")
    if isinstance(key, ec.EllipticCurvePrivateKey):
        if not isinstance(key.curve, ec.SECP256K1):
            raise InvalidKey(f"EC curve {key.curve.name} unsupported; need secp256k1")
        return _keypair_from_ec(key)
    if isinstance(key, rsa.RSAPrivateKey):
        return KeyPair(
            SCHEME_RSA_SHA256,
            public=key.public_key().public_bytes(
                serialization.Encoding.DER, serialization.PublicFormat.SubjectPublicKeyInfo),
            private=key.private_bytes(
                serialization.Encoding.DER, serialization.PrivateFormat.PKCS8,
                serialization.NoEncryption()),
        )
    raise InvalidKey(f"unsupported private key type {type(key).__name__}")


def keypair_from_jwk(jwk: dict) -> KeyPair:
    if jwk.get("kty") != "EC" or jwk.get("crv") not in ("secp256k1", "P-256K"):
        raise InvalidKey("JWK must be an EC key on crv secp256k1")
    x = int.from_bytes(_b64url_decode(jwk["x"]), "big")
    y = int.from_bytes(_b64url_decode(jwk["y"]), "big")
    public = ec.EllipticCurvePublicNumbers(x, y, ec.SECP256K1()).public_key().public_bytes(
        serialization.Encoding.X962, serialization.PublicFormat.CompressedPoint)
    private = _b64url_decode(jwk["d"]) if "d" in jwk else b""
    if private:
        private = private.rjust(32, b"\x00")
    return KeyPair(SCHEME_EC_SECP256K1, public=public, private=private)


def load_keypair(path: Path) -> KeyPair:
    """Load a key file, PEM or JWK, by sniffing the content."""
    data = Path(path).read_bytes()
    if b"-----BEGIN" in data:
        return keypair_from_pem(data)
    try:
        return keypair_from_jwk(json.loads(data))
    except (json.JSONDecodeError, KeyError) as exc:
        raise InvalidKey(f"{path}: neither PEM nor EC JWK: {exc}") from None


# ---------------------------------------------------------------------------
# EDS proofs (detached ES256K JWS)
# ---------------------------------------------------------------------------

def _jws_signing_input(payload: bytes) -> bytes:
    return _b64url(JWS_PROTECTED_HEADER).encode("ascii") + b"." + payload


def _compact_jws(raw_signature: bytes) -> str:
    return f"{_b64url(JWS_PROTECTED_HEADER)}..{_b64url(raw_signature)}"


def sign_payload(payload: bytes, pair: KeyPair, deterministic: bool = False) -> str:
    """Detached compact JWS over arbitrary payload bytes."""
    key = _ec_private_key(pair)
    algorithm = ec.ECDSA(hashes.SHA256(), deterministic_signing=deterministic)
    der = key.sign(_jws_signing_input(payload), algorithm)
    r, s = decode_dss_signature(der)
    return _compact_jws(r.to_bytes(32, "big") + s.to_bytes(32, "big"))


def verify_payload(payload: bytes, jws: str, public_key: bytes) -> VerificationResult:
    parts = jws.split(".")
    if len(parts) != 3 or parts[1] != "":
        return VerificationResult.SIGNATURE_INVALID
    try:
        header = json.loads(_b64url_decode(parts[0]))
        raw = _b64url_decode(parts[2])
    except (ValueError, json.JSONDecodeError):
        return VerificationResult.SIGNATURE_INVALID
    if header.get("alg") != "ES256K" or header.get("b64") is not False:
        return VerificationResult.UNSUPPORTED_ALGORITHM
    if len(raw) != 64:
        return VerificationResult.SIGNATURE_INVALID
    signature = encode_dss_signature(int.from_bytes(raw[:32], "big"), int.from_bytes(raw[32:], "big"))
    signing_input = parts[0].encode("ascii") + b"." + payload
    try:
        ec_public_key_from_bytes(public_key).verify(signature, signing_input,
                                                    ec.ECDSA(hashes.SHA256()))
    except (InvalidSignature, InvalidKey):
        return VerificationResult.SIGNATURE_INVALID
    return VerificationResult.VALID


def sign_credential(cred: EdsCredential, pair: KeyPair, verification_method: str,
                    deterministic: bool = False) -> EdsCredential:
    """Sign a credential in place of its placeholder/pending proof.

    Only the proof block changes: proof_type, verification_method and jws
    are populated; created defaults to the issuance date when unset so the
    operation stays deterministic.
    """
    if cred.proof.jws not in (JWS_PLACEHOLDER, ""):
        raise InvariantViolation("credential already carries a signature", path="proof.jws")
    if pair.scheme != SCHEME_EC_SECP256K1 or not pair.private:
        raise InvalidKey("signing requires an EC secp256k1 private key")
    proof = ProofBlock(
        proof_type=PROOF_TYPE_JWS,
        created=cred.proof.created or cred.issuance_date,
        verification_method=verification_method,
        jws="",
    )
    unsigned = replace(cred, proof=proof)
    jws = sign_payload(serialize_jsonld(unsigned), pair, deterministic=deterministic)
    return replace(unsigned, proof=replace(proof, jws=jws))


def _method_key(did_doc, method_id: str) -> bytes:
    for vm in did_doc.verification_methods:
        if vm.id == method_id:
            return vm.public_key
    raise UnknownVerificationMethod(f"no verification method {method_id!r} in DID document {did_doc.id}")


def verify_credential_signature(cred: EdsCredential, did_doc) -> VerificationResult:
    """Check the credential proof against a resolved DID document."""
    if cred.proof.jws == JWS_PLACEHOLDER:
        raise PlaceholderProof("credential carries the placeholder sentinel, not a signature")
    if not cred.proof.jws:
        raise UnsignedCredential("credential proof is empty")
    public_key = _method_key(did_doc, cred.proof.verification_method)
    return verify_payload(signing_payload(cred), cred.proof.jws, public_key)


def create_presentation(cred: EdsCredential, holder_pair: KeyPair, nonce: str,
                        deterministic: bool = False) -> VerifiablePresentation:
    """Holder-signed, one-time presentation bound to a verifier nonce.

    The proof signs the signed credential's canonical bytes concatenated
    with the nonce, so each nonce yields a distinct proof.
    """
    if cred.proof.jws in (JWS_PLACEHOLDER, ""):
        raise UnsignedCredential("cannot present an unsigned credential")
    if not nonce:
        raise InvariantViolation("presentation nonce must be non-empty")
    holder = derive_did(holder_pair.public)
    payload = serialize_jsonld(cred) + nonce.encode("utf-8")
    jws = sign_payload(payload, holder_pair, deterministic=deterministic)
    proof = ProofBlock(
        proof_type=PROOF_TYPE_JWS,
        created=cred.proof.created or cred.issuance_date,
        verification_method=f"{holder}#keys-1",
        jws=jws,
    )
    return VerifiablePresentation(credential=cred, holder=holder, nonce=nonce, proof=proof)


def verify_presentation(pres: VerifiablePresentation, did_doc, nonce: str) -> VerificationResult:
    public_key = _method_key(did_doc, pres.proof.verification_method)
    payload = serialize_jsonld(pres.credential) + nonce.encode("utf-8")
    return verify_payload(payload, pres.proof.jws, public_key)


# ---------------------------------------------------------------------------
# ELMO XML-DSig (constrained profile)
# ---------------------------------------------------------------------------

def _normalize_newlines(data: bytes) -> bytes:
    return data.replace(b"\r\n", b"\n").replace(b"\r", b"\n")


def _document_digest(data_without_signature: bytes) -> bytes:
    return hashlib.sha256(_normalize_newlines(data_without_signature)).digest()


def _signed_info_xml(digest_b64: str) -> bytes:
    return (
        '<SignedInfo xmlns="http://www.w3.org/2000/09/xmldsig#">'
        '<CanonicalizationMethod Algorithm="http://www.w3.org/TR/2001/REC-xml-c14n-20010315">'
        "</CanonicalizationMethod>"
        f'<SignatureMethod Algorithm="{XMLDSIG_SIG_RSA_SHA256}"></SignatureMethod>'
        '<Reference URI=""><Transforms>'
        '<Transform Algorithm="http://www.w3.org/2000/09/xmldsig#enveloped-signature"></Transform>'
        f'</Transforms><DigestMethod Algorithm="{XMLDSIG_DIGEST_SHA256}"></DigestMethod>'
        f"<DigestValue>{digest_b64}</DigestValue></Reference></SignedInfo>"
    ).encode("ascii")


def sign_elmo_xml(xml_bytes: bytes, rsa_private_pem: bytes, certificate_der: bytes) -> bytes:
    """Envelope an RSA-SHA256 XML-DSig block as the last child of <elmo>.

    Used to produce the signed fixture corpus under the same constrained
    profile that verify_xmldsig checks.
    """
    key = serialization.load_pem_private_key(rsa_private_pem, password=None)
    if not isinstance(key, rsa.RSAPrivateKey):
        raise InvalidKey("XML signing requires an RSA private key")
    if _SIGNATURE_RE.search(xml_bytes):
        raise InvariantViolation("document already carries a Signature element")
    digest_b64 = base64.b64encode(_document_digest(xml_bytes)).decode("ascii")
    signed_info = _signed_info_xml(digest_b64)
    signature_value = key.sign(signed_info, padding.PKCS1v15(), hashes.SHA256())
    block = (
        b'<Signature xmlns="http://www.w3.org/2000/09/xmldsig#">' + signed_info
        + b"<SignatureValue>" + base64.b64encode(signature_value) + b"</SignatureValue>"
        + b"<KeyInfo><X509Data><X509Certificate>" + base64.b64encode(certificate_der)
        + b"</X509Certificate></X509Data></KeyInfo></Signature>"
    )
    close = xml_bytes.rfind(b"</elmo>")
    if close < 0:
        raise InvariantViolation("no </elmo> close tag to envelope the signature into")
    return xml_bytes[:close] + block + xml_bytes[close:]


def strip_signature(xml_bytes: bytes) -> bytes:
    """Remove the enveloped Signature element (last occurrence) from raw
    bytes, returning the signed byte range."""
    matches = list(_SIGNATURE_RE.finditer(xml_bytes))
    if not matches:
        return xml_bytes
    last = matches[-1]
    return xml_bytes[:last.start()] + xml_bytes[last.end():]


def verify_xmldsig(doc: ElmoDocument, trusted_cert: Optional[bytes] = None) -> VerificationResult:
    """Verify the enveloped signature of a parsed ELMO document.

    Checks, in order: supported algorithms, certificate pin (when a trusted
    certificate is supplied), document digest, RSA signature over the
    embedded SignedInfo bytes.
    """
    sig = doc.xml_signature
    if sig is None:
        raise MissingSignature("document carries no XML signature block")
    if sig.signed_info_digest_algorithm != XMLDSIG_DIGEST_SHA256 \
            or sig.signature_algorithm != XMLDSIG_SIG_RSA_SHA256:
        return VerificationResult.UNSUPPORTED_ALGORITHM
    if not (sig.digest_value and sig.signature_value and sig.certificate):
        return VerificationResult.SIGNATURE_INVALID
    if trusted_cert is not None and sig.certificate != trusted_cert:
        return VerificationResult.UNTRUSTED_CERTIFICATE

    if _document_digest(strip_signature(doc.raw_bytes)) != sig.digest_value:
        return VerificationResult.DIGEST_MISMATCH

    sig_match = _SIGNATURE_RE.search(doc.raw_bytes)
    info_match = _SIGNED_INFO_RE.search(doc.raw_bytes, sig_match.start() if sig_match else 0)
    if info_match is None:
        return VerificationResult.SIGNATURE_INVALID
    try:
        certificate = x509.load_der_x509_certificate(sig.certificate)
        public_key = certificate.public_key()
        if not isinstance(public_key, rsa.RSAPublicKey):
            return VerificationResult.UNSUPPORTED_ALGORITHM
        public_key.verify(sig.signature_value, info_match.group(0),
                          padding.PKCS1v15(), hashes.SHA256())
    except InvalidSignature:
        return VerificationResult.SIGNATURE_INVALID
    except ValueError:
        return VerificationResult.SIGNATURE_INVALID
    return VerificationResult.VALID
