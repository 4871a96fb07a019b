import json

import pytest

from elmo2eds.cli import main
from elmo2eds.eds import parse_eds

from conftest import ELMO_DIR, GOLDEN_DIR, KEYS_DIR


def test_convert_writes_golden_output(tmp_path, capsys):
    out = tmp_path / "out.jsonld"
    code = main(["convert", str(ELMO_DIR / "transcript_sweden.xml"), "-o", str(out)])
    assert code == 0
    assert out.read_bytes() == (GOLDEN_DIR / "transcript_sweden.jsonld").read_bytes()


def test_convert_to_stdout(capsysbinary):
    code = main(["convert", str(ELMO_DIR / "certificate_finland.xml")])
    assert code == 0
    out = capsysbinary.readouterr().out
    assert out.rstrip(b"\n") == (GOLDEN_DIR / "certificate_finland.jsonld").read_bytes()


def test_convert_rejects_validation_errors(capsys):
    code = main(["convert", str(ELMO_DIR / "bad_country.xml"), "-o", "/dev/null"])
    assert code == 1
    assert "unknown-country" in capsys.readouterr().err


def test_validate_clean_exit_zero(capsys):
    code = main(["validate", str(ELMO_DIR / "transcript_sweden.xml")])
    assert code == 0
    assert "no findings" in capsys.readouterr().out


def test_validate_bad_country_exit_one(capsys):
    code = main(["validate", str(ELMO_DIR / "bad_country.xml")])
    assert code == 1
    assert "unknown-country" in capsys.readouterr().out


def test_validate_json_output(capsys):
    code = main(["validate", str(ELMO_DIR / "bad_country.xml"), "--json"])
    assert code == 1
    findings = json.loads(capsys.readouterr().out)["findings"]
    assert findings[0]["code"] == "unknown-country"
    assert findings[0]["severity"] == "error"


def test_did_derive_prints_golden(capsys):
    code = main(["did", "derive", "--key", str(KEYS_DIR / "k1.jwk")])
    assert code == 0
    expected = (GOLDEN_DIR / "did_k1.txt").read_text().strip()
    assert capsys.readouterr().out.strip() == expected


def test_did_derive_json(capsys):
    code = main(["did", "derive", "--key", str(KEYS_DIR / "issuer_ec.pem"), "--json"])
    assert code == 0
    out = json.loads(capsys.readouterr().out)
    assert out["did"] == (GOLDEN_DIR / "did_issuer_ec.txt").read_text().strip()


def test_sign_verify_registry_flow(tmp_path, capsys):
    registry = tmp_path / "registry.jsonl"
    cred_path = tmp_path / "cred.jsonld"

    # convert in signing mode with DIDs derived from the test keys
    assert main(["convert", str(ELMO_DIR / "transcript_sweden.xml"), "-o", str(cred_path),
                 "--mode", "signing",
                 "--key", str(KEYS_DIR / "issuer_ec.pem"),
                 "--holder-key", str(KEYS_DIR / "holder_ec.pem")]) == 0

    # sign it
    assert main(["sign", str(cred_path), "--key", str(KEYS_DIR / "issuer_ec.pem")]) == 0
    signed = parse_eds(cred_path.read_bytes())
    assert signed.proof.jws not in ("", "PLACEHOLDER")

    # register the issuer, trust it and the schema
    assert main(["registry", "--registry", str(registry), "register-did",
                 "--key", str(KEYS_DIR / "issuer_ec.pem")]) == 0
    issuer_did = capsys.readouterr().out.strip().splitlines()[-1]
    assert main(["registry", "--registry", str(registry), "add-issuer", issuer_did]) == 0
    assert main(["registry", "--registry", str(registry), "add-schema",
                 signed.credential_schema[0]]) == 0
    assert main(["registry", "--registry", str(registry), "check"]) == 0
    capsys.readouterr()

    # full verification passes
    assert main(["verify", str(cred_path), "--registry", str(registry), "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["valid"] is True

    # tampering flips the proof check and the exit code
    tampered = cred_path.read_bytes().replace(b"Anna Maria", b"Mallory Xx")
    tampered_path = tmp_path / "tampered.jsonld"
    tampered_path.write_bytes(tampered)
    assert main(["verify", str(tampered_path), "--registry", str(registry)]) == 1


def test_registry_check_detects_tamper(tmp_path, capsys):
    registry = tmp_path / "registry.jsonl"
    assert main(["registry", "--registry", str(registry), "add-issuer", "did:ebsi:zA"]) == 0
    assert main(["registry", "--registry", str(registry), "add-schema", "urn:schema:x"]) == 0
    text = registry.read_text().replace("did:ebsi:zA", "did:ebsi:zB")
    registry.write_text(text)
    assert main(["registry", "--registry", str(registry), "check"]) == 1
    assert "BROKEN" in capsys.readouterr().out


def test_sign_with_explicit_output(tmp_path):
    cred_path = tmp_path / "cred.jsonld"
    signed_path = tmp_path / "signed.jsonld"
    main(["convert", str(ELMO_DIR / "certificate_germany.xml"), "-o", str(cred_path)])
    assert main(["sign", str(cred_path), "--key", str(KEYS_DIR / "issuer_ec.pem"),
                 "-o", str(signed_path)]) == 0
    assert parse_eds(cred_path.read_bytes()).proof.jws == "PLACEHOLDER"  # input untouched
    assert parse_eds(signed_path.read_bytes()).proof.jws.count(".") == 2


def test_usage_error_exit_two(capsys):
    assert main([]) == 2
    assert main(["convert"]) == 2
    assert main(["no-such-command"]) == 2


def test_missing_file_exit_one(capsys):
    assert main(["validate", "/nonexistent/file.xml"]) == 1


def test_domain_error_exit_one(tmp_path, capsys):
    bad = tmp_path / "bad.xml"
    bad.write_bytes(b"<not-xml")
    assert main(["validate", str(bad)]) == 1
    assert "malformed-xml" in capsys.readouterr().err
