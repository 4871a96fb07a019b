"""End-to-end walk through the issue / present / verify triangle.

Converts the Swedish transcript fixture in signing mode, signs it with the
test issuer key, registers the issuer in a throwaway registry (DID
document, trusted-issuer list, trusted-schema list), verifies the
credential, then exercises a holder presentation with nonce binding and a
tamper case.  Everything runs offline against the checked-in fixtures.

Usage: python scripts/demo_trust_triangle.py [--registry PATH]
"""

import argparse
import sys
import tempfile
from dataclasses import replace
from pathlib import Path

from elmo2eds.elmo import parse_elmo, validate_elmo
from elmo2eds.proofs import (
    create_presentation,
    derive_did,
    load_keypair,
    sign_credential,
    verify_presentation,
)
from elmo2eds.registry import Registry, make_did_document
from elmo2eds.standards import load_registries
from elmo2eds.transform import ConversionMode, ConversionOptions, convert

ROOT = Path(__file__).resolve().parents[1]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--registry", help="registry file (default: a temp file)")
    args = parser.parse_args()

    registry_path = Path(args.registry) if args.registry else \
        Path(tempfile.mkdtemp(prefix="elmo2eds-demo-")) / "registry.jsonl"

    registries = load_registries()
    issuer_pair = load_keypair(ROOT / "fixtures/keys/issuer_ec.pem")
    holder_pair = load_keypair(ROOT / "fixtures/keys/holder_ec.pem")
    issuer_did = derive_did(issuer_pair.public)
    holder_did = derive_did(holder_pair.public)
    print(f"issuer DID  {issuer_did}")
    print(f"holder DID  {holder_did}")

    # issue: convert the ELMO transcript and sign the resulting credential
    doc = parse_elmo((ROOT / "fixtures/elmo/transcript_sweden.xml").read_bytes())
    assert not validate_elmo(doc, registries).errors
    opts = ConversionOptions(mode=ConversionMode.SIGNING,
                             issuer_did=issuer_did, holder_did=holder_did)
    credential = convert(doc, opts, registries).credential
    signed = sign_credential(credential, issuer_pair, f"{issuer_did}#keys-1")
    print(f"issued      {signed.id} ({signed.types[-1]})")

    # anchor trust: DID document, trusted issuer, trusted schema
    registry = Registry(registry_path)
    registry.register_did(make_did_document(issuer_pair))
    registry.register_did(make_did_document(holder_pair))
    registry.add_trusted_issuer(str(issuer_did))
    registry.add_trusted_schema(signed.credential_schema[0], "diploma schema")
    print(f"registry    {registry_path} ({len(registry.state.log)} log records, "
          f"chain ok={registry.log_integrity_ok()})")

    # verify: the four registry-backed checks
    report = registry.verify_credential(signed)
    for check in report.checks:
        print(f"  check {check.name}: {check.status}")
    print(f"verdict     {'VALID' if report.valid else 'NOT VALID'}")

    # present: one-time holder proof bound to a verifier nonce
    pres = create_presentation(signed, holder_pair, nonce="verifier-nonce-1")
    holder_doc = registry.resolve_did(pres.holder)
    ok = verify_presentation(pres, holder_doc, "verifier-nonce-1")
    replay = verify_presentation(pres, holder_doc, "verifier-nonce-2")
    print(f"presentation with its nonce: {ok.value}; replayed under another nonce: {replay.value}")

    # tamper: a single changed claim must break the issuer proof
    subject = signed.credential_subject
    forged = replace(signed, credential_subject=replace(subject, family_name="Mallory"))
    tampered = registry.verify_credential(forged)
    print(f"after tampering, proof check: {tampered.checks[3].status} ({tampered.checks[3].detail})")
    return 0 if report.valid and not tampered.valid else 1


if __name__ == "__main__":
    sys.exit(main())
