"""Generate the checked-in TEST key material under fixtures/keys/.

Idempotent: existing files are left untouched so the fixture corpus stays
stable.  Everything produced here is test-only material; never reuse it
outside this repository.

Outputs:
  issuer_ec.pem / holder_ec.pem  secp256k1 private keys (PKCS8 PEM)
  k1.jwk                         secp256k1 private key as an EC JWK
  issuer_rsa_key.pem             RSA-2048 private key for XML signing
  issuer_rsa_cert.der            matching self-signed certificate
  other_rsa_key.pem/.der         a second certificate (untrusted-cert case)
"""

import base64
import datetime
import json
import sys
from pathlib import Path

from cryptography import x509
from cryptography.hazmat.primitives import hashes, serialization
from cryptography.hazmat.primitives.asymmetric import ec, rsa
from cryptography.x509.oid import NameOID

KEYS_DIR = Path(__file__).resolve().parents[1] / "fixtures" / "keys"


def b64url(data: bytes) -> str:
    return base64.urlsafe_b64encode(data).rstrip(b"=").decode()


def write_once(path: Path, data: bytes) -> None:
    if path.exists():
        print(f"keep  {path}")
        return
    path.write_bytes(data)
    print(f"wrote {path}")


def ec_pem(key) -> bytes:
    return key.private_bytes(serialization.Encoding.PEM,
                             serialization.PrivateFormat.PKCS8,
                             serialization.NoEncryption())


def make_cert(key, common_name: str) -> bytes:
    name = x509.Name([
        x509.NameAttribute(NameOID.COMMON_NAME, common_name),
        x509.NameAttribute(NameOID.ORGANIZATION_NAME, "elmo2eds test fixtures"),
    ])
    not_before = datetime.datetime(2022, 1, 1, tzinfo=datetime.timezone.utc)
    cert = (x509.CertificateBuilder()
            .subject_name(name).issuer_name(name)
            .public_key(key.public_key())
            .serial_number(x509.random_serial_number())
            .not_valid_before(not_before)
            .not_valid_after(not_before + datetime.timedelta(days=365 * 30))
            .sign(key, hashes.SHA256()))
    return cert.public_bytes(serialization.Encoding.DER)


def main() -> int:
    KEYS_DIR.mkdir(parents=True, exist_ok=True)

    for name in ("issuer_ec.pem", "holder_ec.pem"):
        if not (KEYS_DIR / name).exists():
            write_once(KEYS_DIR / name, ec_pem(ec.generate_private_key(ec.SECP256K1())))
        else:
            print(f"keep  {KEYS_DIR / name}")

    jwk_path = KEYS_DIR / "k1.jwk"
    if not jwk_path.exists():
        key = ec.generate_private_key(ec.SECP256K1())
        numbers = key.private_numbers()
        pub = numbers.public_numbers
        jwk = {
            "kty": "EC",
            "crv": "secp256k1",
            "x": b64url(pub.x.to_bytes(32, "big")),
            "y": b64url(pub.y.to_bytes(32, "big")),
            "d": b64url(numbers.private_value.to_bytes(32, "big")),
            "kid": "elmo2eds-test-k1",
        }
        write_once(jwk_path, (json.dumps(jwk, indent=2) + "\n").encode())
    else:
        print(f"keep  {jwk_path}")

    for stem in ("issuer_rsa", "other_rsa"):
        key_path = KEYS_DIR / f"{stem}_key.pem"
        cert_path = KEYS_DIR / f"{stem}_cert.der"
        if key_path.exists() and cert_path.exists():
            print(f"keep  {key_path} / {cert_path}")
            continue
        key = rsa.generate_private_key(public_exponent=65537, key_size=2048)
        write_once(key_path, key.private_bytes(
            serialization.Encoding.PEM, serialization.PrivateFormat.PKCS8,
            serialization.NoEncryption()))
        write_once(cert_path, make_cert(key, f"elmo2eds test {stem}"))
    return 0


if __name__ == "__main__":
    sys.exit(main())
