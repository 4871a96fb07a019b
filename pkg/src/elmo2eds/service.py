"""HTTP face of the converter: POST /convert, POST /verify, GET /health.

/convert takes ELMO XML (application/xml) and returns the canonical
JSON-LD credential (application/ld+json) plus an
``X-Conversion-Warnings-Count`` header.  Query parameters: ``mode``
(placeholder|signing), ``type`` (certificate|transcript override), ``sign``
(true to sign with the configured issuer key; implies signing mode).
Malformed input never produces a 5xx: parse and validation problems map to
400, oversize bodies to 413, unclassifiable documents to 422.

/verify takes an EDS credential and returns the four-check registry
verification report as JSON.

Conversion is pure and fully concurrent; registry access goes through the
Registry mutation lock, so /convert stays responsive while registry
mutations are in flight.  Structured one-line log records go to stderr;
request bodies are never logged (credentials carry personal data).
"""

from __future__ import annotations

import json
import sys
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Optional
from urllib.parse import parse_qs, urlparse

from . import proofs
from .config import ServiceConfig
from .eds import parse_eds, serialize_jsonld
from .elmo import DocumentType, parse_elmo, validate_elmo
from .errors import (
    Elmo2EdsError,
    MalformedJson,
    MalformedXml,
    OversizeInput,
    SchemaViolation,
    UnclassifiableDocument,
    UnmappableClaim,
)
from .registry import Registry
from .standards import StandardsRegistries, load_registries
from .transform import ClaimMapping, ConversionMode, ConversionOptions, convert, load_mapping_overrides

_TYPE_TOKENS = {
    "certificate": DocumentType.UPPER_SECONDARY_SCHOOL_CERTIFICATE,
    "transcript": DocumentType.TRANSCRIPT_OF_RECORDS,
    DocumentType.UPPER_SECONDARY_SCHOOL_CERTIFICATE.value: DocumentType.UPPER_SECONDARY_SCHOOL_CERTIFICATE,
    DocumentType.TRANSCRIPT_OF_RECORDS.value: DocumentType.TRANSCRIPT_OF_RECORDS,
}


def log_event(**fields) -> None:
    print(json.dumps({"ts": time.time(), **fields}, sort_keys=True), file=sys.stderr, flush=True)


class _BadRequest(Exception):
    def __init__(self, status: int, code: str, message: str, path: Optional[str] = None):
        super().__init__(message)
        self.status = status
        self.body = {"code": code, "message": message}
        if path:
            self.body["path"] = path


class ConverterService:
    """Holds the shared state behind the HTTP handler."""

    def __init__(self, config: ServiceConfig,
                 registries: Optional[StandardsRegistries] = None,
                 registry: Optional[Registry] = None):
        self.config = config
        self.registries = registries or load_registries()
        self.registry = registry or Registry(config.registry_path)
        self.overrides: tuple[ClaimMapping, ...] = ()
        if config.mapping_override_path is not None:
            self.overrides = load_mapping_overrides(config.mapping_override_path)
        self.issuer_pair = proofs.load_keypair(config.issuer_key_path) \
            if config.issuer_key_path else None
        self.holder_pair = proofs.load_keypair(config.holder_key_path) \
            if config.holder_key_path else None

    # ---- /convert -------------------------------------------------------

    def handle_convert(self, body: bytes, query: dict[str, str]) -> tuple[int, dict, bytes]:
        mode_token = query.get("mode", self.config.mode_default.value)
        sign = query.get("sign", "").lower() in ("1", "true", "yes")
        try:
            mode = ConversionMode(mode_token)
        except ValueError:
            raise _BadRequest(400, "bad-query", f"mode must be placeholder or signing, not {mode_token!r}")
        if sign:
            mode = ConversionMode.SIGNING
        type_override = None
        if "type" in query:
            type_override = _TYPE_TOKENS.get(query["type"])
            if type_override is None:
                raise _BadRequest(400, "bad-query", f"unknown document type {query['type']!r}")

        if mode == ConversionMode.SIGNING:
            if self.issuer_pair is None or self.holder_pair is None:
                raise _BadRequest(400, "signing-unavailable",
                                  "signing mode needs issuer_key_path and holder_key_path configured")
            issuer_did = proofs.derive_did(self.issuer_pair.public)
            holder_did = proofs.derive_did(self.holder_pair.public)
        else:
            issuer_did = holder_did = None

        try:
            doc = parse_elmo(body, max_bytes=self.config.max_body_bytes)
        except OversizeInput as exc:
            raise _BadRequest(413, exc.code, exc.message)
        except (MalformedXml, SchemaViolation) as exc:
            raise _BadRequest(400, exc.code, exc.message, exc.path)

        report = validate_elmo(doc, self.registries)
        if report.errors:
            raise _BadRequest(400, "validation-failed",
                              "; ".join(f"{f.path}: {f.code}" for f in report.errors),
                              report.errors[0].path)

        opts = ConversionOptions(
            mode=mode, holder_did=holder_did, issuer_did=issuer_did,
            explicit_type_override=type_override,
            schema_id=self.config.schema_id,
            mapping_overrides=self.overrides,
        )
        try:
            conversion = convert(doc, opts, self.registries)
        except UnclassifiableDocument as exc:
            raise _BadRequest(422, exc.code, exc.message)
        except UnmappableClaim as exc:
            raise _BadRequest(400, exc.code, exc.message, exc.path)

        credential = conversion.credential
        if sign:
            method = f"{issuer_did}#keys-1"
            credential = proofs.sign_credential(credential, self.issuer_pair, method)
        payload = serialize_jsonld(credential)
        headers = {
            "Content-Type": "application/ld+json",
            "X-Conversion-Warnings-Count": str(len(conversion.warnings)),
        }
        return 200, headers, payload

    # ---- /verify --------------------------------------------------------

    def handle_verify(self, body: bytes) -> tuple[int, dict, bytes]:
        try:
            cred = parse_eds(body)
        except (MalformedJson, SchemaViolation, Elmo2EdsError) as exc:
            raise _BadRequest(400, exc.code, exc.message, exc.path)
        report = self.registry.verify_credential(cred)
        payload = json.dumps(report.to_dict()).encode("utf-8")
        return 200, {"Content-Type": "application/json"}, payload


def _make_handler(service: ConverterService):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"
        server_version = "elmo2eds"

        def log_message(self, format, *args):  # route through structured logging
            pass

        def _respond(self, status: int, headers: dict, body: bytes) -> None:
            self.send_response(status)
            for name, value in headers.items():
                self.send_header(name, value)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def _respond_error(self, status: int, body: dict) -> None:
            self._respond(status, {"Content-Type": "application/json"},
                          json.dumps(body).encode("utf-8"))

        def _read_body(self) -> bytes:
            try:
                length = int(self.headers.get("Content-Length", "0") or "0")
            except ValueError:
                raise _BadRequest(400, "bad-request", "unreadable Content-Length")
            if length < 0:
                raise _BadRequest(400, "bad-request", "negative Content-Length")
            if length > service.config.max_body_bytes:
                raise _BadRequest(413, "oversize-input",
                                  f"body of {length} bytes exceeds {service.config.max_body_bytes}")
            return self.rfile.read(length)

        def _handle(self, method: str) -> None:
            started = time.time()
            url = urlparse(self.path)
            status = 500
            try:
                try:
                    if method == "GET" and url.path == "/health":
                        status = 200
                        self._respond(200, {"Content-Type": "application/json"}, b'{"status":"ok"}')
                        return
                    if method != "POST":
                        raise _BadRequest(405, "method-not-allowed", f"{method} not supported")
                    body = self._read_body()
                    if url.path == "/convert":
                        query = {k: v[-1] for k, v in parse_qs(url.query).items()}
                        status, headers, payload = service.handle_convert(body, query)
                    elif url.path == "/verify":
                        status, headers, payload = service.handle_verify(body)
                    else:
                        raise _BadRequest(404, "not-found", f"no endpoint {url.path}")
                    self._respond(status, headers, payload)
                except _BadRequest as exc:
                    status = exc.status
                    self._respond_error(exc.status, exc.body)
                except Elmo2EdsError as exc:
                    status = 400
                    self._respond_error(400, exc.to_dict())
                except Exception as exc:  # malformed input must never take the worker down
                    status = 400
                    self._respond_error(400, {"code": "bad-request", "message": str(exc)})
            finally:
                log_event(method=method, path=url.path, status=status,
                          duration_ms=round((time.time() - started) * 1000, 2))

        def do_GET(self):
            self._handle("GET")

        def do_POST(self):
            self._handle("POST")

        def do_PUT(self):
            self._handle("PUT")

        def do_DELETE(self):
            self._handle("DELETE")

        def do_HEAD(self):
            self._handle("HEAD")

    return Handler


def make_server(config: ServiceConfig,
                registries: Optional[StandardsRegistries] = None,
                registry: Optional[Registry] = None) -> ThreadingHTTPServer:
    service = ConverterService(config, registries=registries, registry=registry)
    server = ThreadingHTTPServer((config.host, config.port), _make_handler(service))
    server.daemon_threads = True
    server.converter_service = service
    return server


def serve(config: ServiceConfig) -> None:
    server = make_server(config)
    host, port = server.server_address[:2]
    log_event(event="listening", host=host, port=port)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
