"""Produce the signed ELMO fixture (enveloped RSA-SHA256 XML-DSig).

Signs fixtures/elmo/transcript_sweden.xml with the checked-in test RSA key
and writes transcript_sweden_signed.xml next to it.  The constrained
profile used here is the one verify_xmldsig checks; tests verify the
result against a pure-Python RSA oracle as well.
"""

import sys
from pathlib import Path

from elmo2eds.proofs import sign_elmo_xml

ROOT = Path(__file__).resolve().parents[1]
ELMO = ROOT / "fixtures" / "elmo"
KEYS = ROOT / "fixtures" / "keys"


def main() -> int:
    source = (ELMO / "transcript_sweden.xml").read_bytes()
    signed = sign_elmo_xml(
        source,
        (KEYS / "issuer_rsa_key.pem").read_bytes(),
        (KEYS / "issuer_rsa_cert.der").read_bytes(),
    )
    out = ELMO / "transcript_sweden_signed.xml"
    out.write_bytes(signed)
    print(f"wrote {out} ({len(signed)} bytes)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
