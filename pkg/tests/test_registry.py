import json
import threading
from dataclasses import replace
from pathlib import Path

import pytest

from elmo2eds.eds import SCHEMA_PLACEHOLDER_ID, parse_eds
from elmo2eds.elmo import parse_elmo
from elmo2eds.errors import DuplicateDid, RegistryCorrupt
from elmo2eds.proofs import derive_did, generate_ec_keypair, load_keypair, sign_credential
from elmo2eds.registry import (
    GENESIS_HASH,
    LogEntry,
    Registry,
    RegistryState,
    add_trusted_issuer,
    add_trusted_schema,
    load_registry_file,
    make_did_document,
    record_hash,
    register_did,
    resolve_did,
    verify_credential_full,
    verify_log_integrity,
)
from elmo2eds.transform import ConversionMode, ConversionOptions, convert

from conftest import KEYS_DIR


@pytest.fixture()
def issuer_pair():
    return load_keypair(KEYS_DIR / "issuer_ec.pem")


@pytest.fixture()
def signed_setup(issuer_pair, registries, elmo_bytes):
    """(state, signed credential) with issuer registered, trusted, schema trusted."""
    holder_pair = load_keypair(KEYS_DIR / "holder_ec.pem")
    issuer_did = derive_did(issuer_pair.public)
    opts = ConversionOptions(mode=ConversionMode.SIGNING, issuer_did=issuer_did,
                             holder_did=derive_did(holder_pair.public))
    cred = convert(parse_elmo(elmo_bytes("transcript_sweden")), opts, registries).credential
    signed = sign_credential(cred, issuer_pair, f"{issuer_did}#keys-1")

    state = RegistryState()
    register_did(state, make_did_document(issuer_pair, timestamp="2022-06-03T08:30:00Z"))
    add_trusted_issuer(state, str(issuer_did))
    add_trusted_schema(state, SCHEMA_PLACEHOLDER_ID, "diploma schema")
    return state, signed


def test_register_and_resolve(issuer_pair):
    state = RegistryState()
    doc = make_did_document(issuer_pair)
    register_did(state, doc)
    assert resolve_did(state, doc.id) == doc
    assert resolve_did(state, str(doc.id)) == doc


def test_duplicate_did_rejected(issuer_pair):
    state = RegistryState()
    doc = make_did_document(issuer_pair)
    register_did(state, doc)
    with pytest.raises(DuplicateDid):
        register_did(state, doc)


def test_resolve_unregistered_is_absent():
    assert resolve_did(RegistryState(), "did:ebsi:zNobody") is None


def test_resolve_read_only_deterministic(issuer_pair):
    state = RegistryState()
    doc = make_did_document(issuer_pair)
    register_did(state, doc)
    assert resolve_did(state, doc.id) is resolve_did(state, doc.id)
    assert len(state.log) == 1


def test_three_registrations_build_valid_chain():
    state = RegistryState()
    for _ in range(3):
        register_did(state, make_did_document(generate_ec_keypair()))
    assert len(state.log) == 3
    assert [e.seq for e in state.log] == [0, 1, 2]
    assert state.log[0].prev == GENESIS_HASH
    assert state.log[1].prev == state.log[0].hash
    assert state.log[2].prev == state.log[1].hash
    assert verify_log_integrity(state)


def test_log_integrity_empty_log_vacuous():
    assert verify_log_integrity(RegistryState())


def test_log_integrity_detects_in_memory_tamper(issuer_pair):
    state = RegistryState()
    register_did(state, make_did_document(issuer_pair))
    add_trusted_issuer(state, "did:ebsi:zX")
    entry = state.log[0]
    state.log[0] = LogEntry(entry.seq, entry.kind, dict(entry.payload, created="1999-01-01T00:00:00Z"),
                            entry.prev, entry.hash)
    assert not verify_log_integrity(state)


def test_verify_credential_full_happy_path(signed_setup):
    state, signed = signed_setup
    report = verify_credential_full(state, signed)
    assert [c.status for c in report.checks] == ["pass", "pass", "pass", "pass"]
    assert report.valid


def test_verify_untrusted_issuer_fails_only_check2(signed_setup):
    state, signed = signed_setup
    state.trusted_issuers.clear()
    report = verify_credential_full(state, signed)
    assert [c.status for c in report.checks] == ["pass", "fail", "pass", "pass"]
    assert not report.valid


def test_verify_unknown_schema_fails_only_check3(signed_setup):
    state, signed = signed_setup
    stranger = replace(signed, credential_schema=("https://elsewhere.example/schema", "FullJsonSchemaValidator2021"))
    # the schema reference is inside the signed payload, so swap breaks the
    # proof too; re-sign to isolate check 3
    unsigned = replace(stranger, proof=replace(stranger.proof, jws=""))
    issuer_pair = load_keypair(KEYS_DIR / "issuer_ec.pem")
    resigned = sign_credential(unsigned, issuer_pair, signed.proof.verification_method)
    report = verify_credential_full(state, resigned)
    assert [c.status for c in report.checks] == ["pass", "pass", "fail", "pass"]


def test_verify_tampered_proof_fails_only_check4(signed_setup):
    state, signed = signed_setup
    subject = signed.credential_subject
    tampered = replace(signed, credential_subject=replace(subject, given_name="Mallory"))
    report = verify_credential_full(state, tampered)
    assert [c.status for c in report.checks] == ["pass", "pass", "pass", "fail"]


def test_verify_unknown_issuer_fails_check1_skips_check4(signed_setup):
    state, signed = signed_setup
    state.did_records.clear()
    report = verify_credential_full(state, signed)
    assert [c.status for c in report.checks] == ["fail", "pass", "pass", "skipped"]
    assert not report.valid


def test_verify_placeholder_reports_placeholder_proof(signed_setup, golden_bytes):
    state, _ = signed_setup
    placeholder = parse_eds(golden_bytes("transcript_sweden.jsonld"))
    report = verify_credential_full(state, placeholder)
    proof_check = report.checks[3]
    assert proof_check.status == "fail"
    assert proof_check.detail == "placeholder-proof"


def test_verification_repeatable(signed_setup):
    state, signed = signed_setup
    assert verify_credential_full(state, signed).to_dict() == verify_credential_full(state, signed).to_dict()


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------

def test_persistence_round_trip(tmp_path, issuer_pair):
    path = tmp_path / "registry.jsonl"
    reg = Registry(path)
    doc = make_did_document(issuer_pair, timestamp="2022-06-03T08:30:00Z")
    reg.register_did(doc)
    reg.add_trusted_issuer(str(doc.id))
    reg.add_trusted_schema(SCHEMA_PLACEHOLDER_ID, "diploma")

    reloaded = Registry(path)
    assert reloaded.resolve_did(doc.id) == doc
    assert str(doc.id) in reloaded.state.trusted_issuers
    assert SCHEMA_PLACEHOLDER_ID in reloaded.state.trusted_schemas
    assert reloaded.log_integrity_ok()
    assert len(path.read_text().splitlines()) == 3


def test_corrupt_tail_rejected_at_load(tmp_path, issuer_pair):
    path = tmp_path / "registry.jsonl"
    reg = Registry(path)
    reg.register_did(make_did_document(issuer_pair))
    with path.open("a") as fh:
        fh.write('{"seq": 1, "kind": "add-issuer", "payl')  # crash artifact
    with pytest.raises(RegistryCorrupt):
        load_registry_file(path)


def test_disk_tamper_detected_by_integrity_check(tmp_path, issuer_pair):
    path = tmp_path / "registry.jsonl"
    reg = Registry(path)
    reg.register_did(make_did_document(issuer_pair))
    reg.add_trusted_issuer("did:ebsi:zSomeone")

    lines = path.read_text().splitlines()
    record = json.loads(lines[0])
    record["payload"]["created"] = "1999-01-01T00:00:00Z"
    lines[0] = json.dumps(record, sort_keys=True, separators=(",", ":"))
    path.write_text("\n".join(lines) + "\n")

    tampered = Registry(path)
    assert not tampered.log_integrity_ok()


def test_mutations_append_only(tmp_path):
    path = tmp_path / "registry.jsonl"
    reg = Registry(path)
    sizes = []
    for _ in range(4):
        reg.register_did(make_did_document(generate_ec_keypair()))
        sizes.append(path.stat().st_size)
    assert sizes == sorted(sizes)
    assert [e.seq for e in reg.state.log] == [0, 1, 2, 3]


def test_interleaved_threaded_mutations_keep_chain_valid(tmp_path):
    path = tmp_path / "registry.jsonl"
    reg = Registry(path)
    errors = []

    def mutate(i):
        try:
            reg.register_did(make_did_document(generate_ec_keypair()))
            reg.add_trusted_issuer(f"did:ebsi:zWorker{i}")
        except Exception as exc:  # pragma: no cover
            errors.append(exc)

    threads = [threading.Thread(target=mutate, args=(i,)) for i in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert not errors
    assert reg.log_integrity_ok()
    assert Registry(path).log_integrity_ok()
    assert len(reg.state.log) == 16


def test_record_hash_is_stable():
    payload = {"did": "did:ebsi:zX"}
    assert record_hash(0, "add-issuer", payload, GENESIS_HASH) == \
        record_hash(0, "add-issuer", dict(payload), GENESIS_HASH)
