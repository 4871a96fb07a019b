"""Exception hierarchy shared across the converter."""


class Elmo2EdsError(Exception):
    """Base class for all converter errors.

    ``code`` is a stable machine-readable identifier used in CLI/JSON and
    HTTP error bodies; ``path`` optionally points at the offending claim.
    """

    code = "error"

    def __init__(self, message: str, path: str | None = None):
        super().__init__(message)
        self.message = message
        self.path = path

    def to_dict(self) -> dict:
        body = {"code": self.code, "message": self.message}
        if self.path is not None:
            body["path"] = self.path
        return body


class MalformedXml(Elmo2EdsError):
    code = "malformed-xml"


class SchemaViolation(Elmo2EdsError):
    code = "schema-violation"


class OversizeInput(Elmo2EdsError):
    code = "oversize-input"


class UnclassifiableDocument(Elmo2EdsError):
    code = "unclassifiable-document"


class UnknownStandard(Elmo2EdsError):
    code = "unknown-standard"


class InvalidGenderCode(Elmo2EdsError):
    code = "invalid-gender-code"


class MalformedJson(Elmo2EdsError):
    code = "malformed-json"


class InvariantViolation(Elmo2EdsError):
    code = "invariant-violation"


class UnmappableClaim(Elmo2EdsError):
    code = "unmappable-claim"


class MissingSignature(Elmo2EdsError):
    code = "missing-signature"


class InvalidKey(Elmo2EdsError):
    code = "invalid-key"


class UnsignedCredential(Elmo2EdsError):
    code = "unsigned-credential"


class UnknownVerificationMethod(Elmo2EdsError):
    code = "unknown-verification-method"


class PlaceholderProof(Elmo2EdsError):
    code = "placeholder-proof"


class DuplicateDid(Elmo2EdsError):
    code = "duplicate-did"


class RegistryCorrupt(Elmo2EdsError):
    code = "registry-corrupt"


class ConfigError(Elmo2EdsError):
    code = "config-error"
