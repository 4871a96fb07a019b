"""ELMO to EBSI diploma schema credential converter.

Parse EMREX ELMO XML credentials, map their claims and external standards
onto the EBSI diploma schema, and emit canonical JSON-LD with DID and
signature placeholders or real ES256K proofs.  A simulated verifiable data
registry (DID documents, trusted issuers, trusted schemas) backs the full
issue/present/verify flow at desk scale.
"""

from .eds import Did, EdsAchievement, EdsCredential, EdsSubject, ProofBlock, parse_eds, serialize_jsonld
from .elmo import DocumentType, ElmoDocument, detect_document_type, parse_elmo, validate_elmo
from .registry import Registry, RegistryState, VerificationReport, make_did_document
from .standards import StandardsRegistries, load_registries, lookup, map_gender, map_grading_scheme
from .transform import ConversionMode, ConversionOptions, ConversionReport, convert, select_template

__version__ = "0.1.0"

__all__ = [
    "ConversionMode",
    "ConversionOptions",
    "ConversionReport",
    "Did",
    "DocumentType",
    "EdsAchievement",
    "EdsCredential",
    "EdsSubject",
    "ElmoDocument",
    "ProofBlock",
    "Registry",
    "RegistryState",
    "StandardsRegistries",
    "VerificationReport",
    "convert",
    "detect_document_type",
    "load_registries",
    "lookup",
    "make_did_document",
    "map_gender",
    "map_grading_scheme",
    "parse_eds",
    "parse_elmo",
    "select_template",
    "serialize_jsonld",
    "validate_elmo",
    "__version__",
]
