"""Command-line interface.

Subcommands: convert, validate, sign, verify, did, registry, serve.
Exit codes: 0 success, 1 validation/verification failure or domain error,
2 usage error.  ``--json`` switches the report-style commands to
machine-readable output.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from . import proofs
from .config import load_config
from .eds import parse_eds, serialize_jsonld
from .elmo import DocumentType, parse_elmo, validate_elmo
from .errors import Elmo2EdsError
from .registry import Registry, make_did_document
from .service import serve
from .standards import load_registries
from .transform import ConversionMode, ConversionOptions, convert, load_mapping_overrides

_TYPE_TOKENS = {
    "certificate": DocumentType.UPPER_SECONDARY_SCHOOL_CERTIFICATE,
    "transcript": DocumentType.TRANSCRIPT_OF_RECORDS,
}


def _write_output(data: bytes, output: Optional[str]) -> None:
    if output in (None, "-"):
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.write(b"\n")
    else:
        Path(output).write_bytes(data)


def _findings_json(report) -> list[dict]:
    return [{"severity": f.severity, "path": f.path, "code": f.code, "message": f.message}
            for f in report.findings]


def cmd_convert(args) -> int:
    registries = load_registries()
    data = Path(args.input).read_bytes()
    doc = parse_elmo(data)
    report = validate_elmo(doc, registries)
    if report.errors:
        for f in report.errors:
            print(f"error: {f.path}: {f.code}: {f.message}", file=sys.stderr)
        return 1

    mode = ConversionMode(args.mode)
    if args.sign:
        mode = ConversionMode.SIGNING
    issuer_did = holder_did = None
    issuer_pair = proofs.load_keypair(Path(args.key)) if args.key else None
    if mode == ConversionMode.SIGNING:
        if args.issuer_did:
            issuer_did = proofs.Did.parse(args.issuer_did)
        elif issuer_pair is not None:
            issuer_did = proofs.derive_did(issuer_pair.public)
        if args.holder_did:
            holder_did = proofs.Did.parse(args.holder_did)
        elif args.holder_key:
            holder_did = proofs.derive_did(proofs.load_keypair(Path(args.holder_key)).public)
        if issuer_did is None or holder_did is None:
            print("error: signing mode needs issuer and holder DIDs (or keys to derive them)",
                  file=sys.stderr)
            return 1

    overrides = load_mapping_overrides(Path(args.override)) if args.override else ()
    opts = ConversionOptions(
        mode=mode, holder_did=holder_did, issuer_did=issuer_did,
        explicit_type_override=_TYPE_TOKENS[args.type] if args.type else None,
        mapping_overrides=tuple(overrides),
        **({"schema_id": args.schema_id} if args.schema_id else {}),
    )
    conversion = convert(doc, opts, registries)
    credential = conversion.credential
    if args.sign:
        if issuer_pair is None:
            print("error: --sign needs --key <issuer key file>", file=sys.stderr)
            return 1
        credential = proofs.sign_credential(
            credential, issuer_pair, f"{issuer_did}#keys-1", deterministic=args.deterministic)
    _write_output(serialize_jsonld(credential), args.output)
    for warning in conversion.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return 0


def cmd_validate(args) -> int:
    registries = load_registries()
    doc = parse_elmo(Path(args.input).read_bytes())
    report = validate_elmo(doc, registries)
    if args.json:
        print(json.dumps({"findings": _findings_json(report)}, indent=2))
    else:
        for f in report.findings:
            print(f"{f.severity}: {f.path}: {f.code}: {f.message}")
        if not report.findings:
            print("no findings")
    return 1 if report.errors else 0


def cmd_sign(args) -> int:
    pair = proofs.load_keypair(Path(args.key))
    cred = parse_eds(Path(args.input).read_bytes())
    method = args.verification_method or f"{proofs.derive_did(pair.public)}#keys-1"
    signed = proofs.sign_credential(cred, pair, method, deterministic=args.deterministic)
    _write_output(serialize_jsonld(signed), args.output or args.input)
    return 0


def cmd_verify(args) -> int:
    cred = parse_eds(Path(args.input).read_bytes())
    registry = Registry(Path(args.registry))
    report = registry.verify_credential(cred)
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    else:
        for check in report.checks:
            detail = f" ({check.detail})" if check.detail else ""
            print(f"{check.name}: {check.status}{detail}")
        print("valid" if report.valid else "NOT valid")
    return 0 if report.valid else 1


def cmd_did(args) -> int:
    pair = proofs.load_keypair(Path(args.key))
    did = proofs.derive_did(pair.public, method=args.method)
    if args.json:
        print(json.dumps({"did": str(did)}))
    else:
        print(did)
    return 0


def cmd_registry(args) -> int:
    registry = Registry(Path(args.registry))
    if args.registry_cmd == "add-issuer":
        registry.add_trusted_issuer(args.did)
        print(f"trusted issuer: {args.did}")
    elif args.registry_cmd == "add-schema":
        registry.add_trusted_schema(args.schema_id, args.descriptor or "")
        print(f"trusted schema: {args.schema_id}")
    elif args.registry_cmd == "register-did":
        doc = make_did_document(proofs.load_keypair(Path(args.key)))
        registry.register_did(doc)
        print(doc.id)
    elif args.registry_cmd == "check":
        ok = registry.log_integrity_ok()
        print("log integrity: ok" if ok else "log integrity: BROKEN")
        return 0 if ok else 1
    return 0


def cmd_serve(args) -> int:
    config = load_config(Path(args.config) if args.config else None)
    serve(config)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="elmo2eds",
                                     description="ELMO XML to EBSI diploma schema converter")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="convert an ELMO XML file to EDS JSON-LD")
    p.add_argument("input")
    p.add_argument("-o", "--output", help="output file (default: stdout)")
    p.add_argument("--mode", choices=[m.value for m in ConversionMode], default="placeholder")
    p.add_argument("--type", choices=sorted(_TYPE_TOKENS), help="override document type detection")
    p.add_argument("--sign", action="store_true", help="sign with --key (implies signing mode)")
    p.add_argument("--key", help="issuer key file (PEM or JWK)")
    p.add_argument("--holder-key", help="holder key file, to derive the holder DID")
    p.add_argument("--issuer-did")
    p.add_argument("--holder-did")
    p.add_argument("--override", help="mapping override file")
    p.add_argument("--schema-id", help="trusted schema registry id for credentialSchema")
    p.add_argument("--deterministic", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("validate", help="report standard-domain findings for an ELMO file")
    p.add_argument("input")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("sign", help="sign an EDS credential with an EC secp256k1 key")
    p.add_argument("input")
    p.add_argument("--key", required=True)
    p.add_argument("-o", "--output", help="output file (default: rewrite input)")
    p.add_argument("--verification-method")
    p.add_argument("--deterministic", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_sign)

    p = sub.add_parser("verify", help="verify an EDS credential against a registry")
    p.add_argument("input")
    p.add_argument("--registry", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("did", help="DID utilities")
    did_sub = p.add_subparsers(dest="did_cmd", required=True)
    d = did_sub.add_parser("derive", help="derive the DID of a key file")
    d.add_argument("--key", required=True)
    d.add_argument("--method", default="ebsi")
    d.add_argument("--json", action="store_true")
    d.set_defaults(func=cmd_did)

    p = sub.add_parser("registry", help="manage the simulated verifiable data registry")
    p.add_argument("--registry", required=True, help="registry persistence file (JSON lines)")
    reg_sub = p.add_subparsers(dest="registry_cmd", required=True)
    r = reg_sub.add_parser("add-issuer")
    r.add_argument("did")
    r = reg_sub.add_parser("add-schema")
    r.add_argument("schema_id")
    r.add_argument("--descriptor")
    r = reg_sub.add_parser("register-did")
    r.add_argument("--key", required=True)
    reg_sub.add_parser("check", help="verify the hash chain of the registry log")
    p.set_defaults(func=cmd_registry)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--config", help="config file (key=value lines)")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except Elmo2EdsError as exc:
        print(f"error: {exc.code}: {exc.message}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
