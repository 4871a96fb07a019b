"""Simulated verifiable data registry: DID documents, a trusted issuer
list (TIR), a trusted schema list (TSR), and a tamper-evident append-only
log.

Every mutation appends a log record hash-chained with SHA-256 over the
record's canonical JSON (sorted keys, compact separators) -- each record
stores the previous record's hash, the genesis record chains from a
64-zero hash.  The log, not the derived lookup maps, is the source of
truth: persistence is one JSON record per line (``registry.jsonl``) and
state is rebuilt by replay at load.  The store is a single-process stand-in
for a distributed ledger, sufficient to exercise the issue/present/verify
flow offline.

``Registry`` wraps a state with file persistence and a mutation lock;
mutations are serialized, reads are lock-free on the immutable records.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from . import proofs
from .eds import JWS_PLACEHOLDER, Did, EdsCredential
from .errors import DuplicateDid, InvariantViolation, RegistryCorrupt, UnknownVerificationMethod
from .proofs import VerificationResult

GENESIS_HASH = "0" * 64

CHECK_ISSUER_RESOLVES = "issuer-did-resolves"
CHECK_ISSUER_TRUSTED = "issuer-trusted"
CHECK_SCHEMA_TRUSTED = "schema-trusted"
CHECK_PROOF_VALID = "proof-valid"


@dataclass(frozen=True)
class VerificationMethodRecord:
    id: str  # DID URL of the key, e.g. did:ebsi:z...#keys-1
    scheme: str
    public_key: bytes


@dataclass(frozen=True)
class DidDocument:
    id: Did
    verification_methods: tuple[VerificationMethodRecord, ...]
    created: str
    updated: str

    def __post_init__(self):
        if not self.verification_methods:
            raise InvariantViolation(f"DID document {self.id} needs at least one verification method")


@dataclass(frozen=True)
class LogEntry:
    seq: int
    kind: str  # register-did | add-issuer | add-schema
    payload: dict
    prev: str
    hash: str


@dataclass
class RegistryState:
    did_records: dict[str, DidDocument] = field(default_factory=dict)
    trusted_issuers: set[str] = field(default_factory=set)
    trusted_schemas: dict[str, str] = field(default_factory=dict)
    log: list[LogEntry] = field(default_factory=list)


@dataclass(frozen=True)
class Check:
    name: str
    status: str  # pass | fail | skipped
    detail: str = ""


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple[Check, ...]

    @property
    def valid(self) -> bool:
        return all(c.status == "pass" for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "checks": [{"name": c.name, "status": c.status, "detail": c.detail} for c in self.checks],
        }


def record_hash(seq: int, kind: str, payload: dict, prev: str) -> str:
    core = json.dumps({"kind": kind, "payload": payload, "prev": prev, "seq": seq},
                      sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(core.encode("utf-8")).hexdigest()


def _now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _append(state: RegistryState, kind: str, payload: dict) -> LogEntry:
    seq = len(state.log)
    prev = state.log[-1].hash if state.log else GENESIS_HASH
    entry = LogEntry(seq=seq, kind=kind, payload=payload, prev=prev,
                     hash=record_hash(seq, kind, payload, prev))
    state.log.append(entry)
    return entry


def did_document_payload(doc: DidDocument) -> dict:
    return {
        "id": str(doc.id),
        "verificationMethods": [
            {"id": vm.id, "scheme": vm.scheme, "publicKeyHex": vm.public_key.hex()}
            for vm in doc.verification_methods
        ],
        "created": doc.created,
        "updated": doc.updated,
    }


def did_document_from_payload(payload: dict) -> DidDocument:
    return DidDocument(
        id=Did.parse(payload["id"]),
        verification_methods=tuple(
            VerificationMethodRecord(id=vm["id"], scheme=vm["scheme"],
                                     public_key=bytes.fromhex(vm["publicKeyHex"]))
            for vm in payload["verificationMethods"]),
        created=payload.get("created", ""),
        updated=payload.get("updated", ""),
    )


def make_did_document(pair: proofs.KeyPair, method: str = "ebsi",
                      timestamp: Optional[str] = None) -> DidDocument:
    """DID document binding a derived DID to the key pair's public key."""
    did = proofs.derive_did(pair.public, method=method)
    ts = timestamp or _now()
    return DidDocument(
        id=did,
        verification_methods=(VerificationMethodRecord(
            id=f"{did}#keys-1", scheme=pair.scheme, public_key=pair.public),),
        created=ts,
        updated=ts,
    )


def register_did(state: RegistryState, doc: DidDocument) -> RegistryState:
    key = str(doc.id)
    if key in state.did_records:
        raise DuplicateDid(f"{key} is already registered")
    _append(state, "register-did", did_document_payload(doc))
    state.did_records[key] = doc
    return state


def add_trusted_issuer(state: RegistryState, did: str) -> RegistryState:
    if did not in state.trusted_issuers:
        _append(state, "add-issuer", {"did": did})
        state.trusted_issuers.add(did)
    return state


def add_trusted_schema(state: RegistryState, schema_id: str, descriptor: str = "") -> RegistryState:
    if schema_id not in state.trusted_schemas:
        _append(state, "add-schema", {"schemaId": schema_id, "descriptor": descriptor})
        state.trusted_schemas[schema_id] = descriptor
    return state


def resolve_did(state: RegistryState, did: str | Did) -> Optional[DidDocument]:
    return state.did_records.get(str(did))


def verify_log_integrity(state: RegistryState) -> bool:
    """True iff the hash chain is contiguous from the genesis record."""
    prev = GENESIS_HASH
    for i, entry in enumerate(state.log):
        if entry.seq != i or entry.prev != prev:
            return False
        if record_hash(entry.seq, entry.kind, entry.payload, entry.prev) != entry.hash:
            return False
        prev = entry.hash
    return True


def verify_credential_full(state: RegistryState, cred: EdsCredential) -> VerificationReport:
    """Run the four registry-backed checks on a credential.

    (1) issuer DID resolves, (2) issuer is a trusted issuer, (3) the schema
    reference is a trusted schema, (4) the proof verifies against the
    resolved issuer DID document.  Check 4 is 'skipped' when check 1 failed
    because there is no key material to verify against; a skipped check
    still blocks overall validity.
    """
    issuer = str(cred.issuer)
    did_doc = resolve_did(state, issuer)
    checks = [
        Check(CHECK_ISSUER_RESOLVES, "pass" if did_doc else "fail",
              issuer if did_doc else f"{issuer} is not registered"),
        Check(CHECK_ISSUER_TRUSTED,
              "pass" if issuer in state.trusted_issuers else "fail",
              "" if issuer in state.trusted_issuers else f"{issuer} is not in the trusted issuer list"),
        Check(CHECK_SCHEMA_TRUSTED,
              "pass" if cred.credential_schema[0] in state.trusted_schemas else "fail",
              "" if cred.credential_schema[0] in state.trusted_schemas
              else f"schema {cred.credential_schema[0]} is not in the trusted schema list"),
    ]
    if cred.proof.jws == JWS_PLACEHOLDER:
        checks.append(Check(CHECK_PROOF_VALID, "fail", "placeholder-proof"))
    elif not cred.proof.jws:
        checks.append(Check(CHECK_PROOF_VALID, "fail", "unsigned-credential"))
    elif did_doc is None:
        checks.append(Check(CHECK_PROOF_VALID, "skipped", "issuer DID did not resolve"))
    else:
        try:
            result = proofs.verify_credential_signature(cred, did_doc)
        except UnknownVerificationMethod as exc:
            checks.append(Check(CHECK_PROOF_VALID, "fail", f"unknown-verification-method: {exc.message}"))
        else:
            ok = result is VerificationResult.VALID
            checks.append(Check(CHECK_PROOF_VALID, "pass" if ok else "fail",
                                "" if ok else result.value))
    return VerificationReport(checks=tuple(checks))


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------

def _entry_line(entry: LogEntry) -> str:
    return json.dumps({"hash": entry.hash, "kind": entry.kind, "payload": entry.payload,
                       "prev": entry.prev, "seq": entry.seq},
                      sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _replay(state: RegistryState, entry: LogEntry) -> None:
    if entry.kind == "register-did":
        doc = did_document_from_payload(entry.payload)
        state.did_records[str(doc.id)] = doc
    elif entry.kind == "add-issuer":
        state.trusted_issuers.add(entry.payload["did"])
    elif entry.kind == "add-schema":
        state.trusted_schemas[entry.payload["schemaId"]] = entry.payload.get("descriptor", "")
    # unknown kinds stay in the log untouched; forward compatibility


def load_registry_file(path: Path) -> RegistryState:
    """Rebuild state from a JSON-lines log file.

    Structurally corrupt lines (typically a truncated tail after a crash)
    are rejected with RegistryCorrupt; hash-chain tampering is not a load
    error -- it is reported by verify_log_integrity.
    """
    state = RegistryState()
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            entry = LogEntry(seq=obj["seq"], kind=obj["kind"], payload=obj["payload"],
                             prev=obj["prev"], hash=obj["hash"])
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise RegistryCorrupt(f"{path}:{lineno}: unreadable log record ({exc})") from None
        state.log.append(entry)
        _replay(state, entry)
    return state


class Registry:
    """File-backed registry with serialized mutations.

    All mutating calls hold one lock and append to the persistence file
    before updating in-memory state; reads need no lock.
    """

    def __init__(self, path: Optional[Path] = None):
        self.path = Path(path) if path is not None else None
        self._lock = threading.Lock()
        if self.path is not None and self.path.exists():
            self.state = load_registry_file(self.path)
        else:
            self.state = RegistryState()

    def _persist_tail(self) -> None:
        if self.path is None:
            return
        with self.path.open("a", encoding="utf-8") as fh:
            fh.write(_entry_line(self.state.log[-1]) + "\n")

    def register_did(self, doc: DidDocument) -> None:
        with self._lock:
            register_did(self.state, doc)
            self._persist_tail()

    def add_trusted_issuer(self, did: str) -> None:
        with self._lock:
            before = len(self.state.log)
            add_trusted_issuer(self.state, did)
            if len(self.state.log) > before:
                self._persist_tail()

    def add_trusted_schema(self, schema_id: str, descriptor: str = "") -> None:
        with self._lock:
            before = len(self.state.log)
            add_trusted_schema(self.state, schema_id, descriptor)
            if len(self.state.log) > before:
                self._persist_tail()

    def resolve_did(self, did: str | Did) -> Optional[DidDocument]:
        return resolve_did(self.state, did)

    def verify_credential(self, cred: EdsCredential) -> VerificationReport:
        return verify_credential_full(self.state, cred)

    def log_integrity_ok(self) -> bool:
        return verify_log_integrity(self.state)
