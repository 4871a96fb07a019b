"""Service configuration: flat key=value file, overridable per key through
``ELMO2EDS_*`` environment variables (e.g. ``ELMO2EDS_LISTEN_ADDRESS``).

Recognized keys: listen_address, mode_default, issuer_key_path,
holder_key_path, registry_path, max_body_bytes, mapping_override_path,
schema_id.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional

from .eds import SCHEMA_PLACEHOLDER_ID
from .errors import ConfigError
from .transform import ConversionMode

ENV_PREFIX = "ELMO2EDS_"

_KEYS = ("listen_address", "mode_default", "issuer_key_path", "holder_key_path",
         "registry_path", "max_body_bytes", "mapping_override_path", "schema_id")


@dataclass
class ServiceConfig:
    listen_address: str = "127.0.0.1:8080"
    mode_default: ConversionMode = ConversionMode.PLACEHOLDER
    issuer_key_path: Optional[Path] = None
    holder_key_path: Optional[Path] = None
    registry_path: Path = field(default_factory=lambda: Path("registry.jsonl"))
    max_body_bytes: int = 10 * 1024 * 1024
    mapping_override_path: Optional[Path] = None
    schema_id: str = SCHEMA_PLACEHOLDER_ID

    def __post_init__(self):
        if self.mode_default == ConversionMode.SIGNING and (
                self.issuer_key_path is None or self.holder_key_path is None):
            raise ConfigError("mode_default=signing requires issuer_key_path and holder_key_path")

    @property
    def host(self) -> str:
        return self.listen_address.rsplit(":", 1)[0]

    @property
    def port(self) -> int:
        try:
            return int(self.listen_address.rsplit(":", 1)[1])
        except (IndexError, ValueError):
            raise ConfigError(f"listen_address {self.listen_address!r} is not host:port") from None


def _parse_file(path: Path) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, value = stripped.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key = key.strip()
        if key not in _KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value.strip()
    return values


def load_config(path: Optional[Path] = None,
                env: Optional[Mapping[str, str]] = None) -> ServiceConfig:
    env = os.environ if env is None else env
    values = _parse_file(Path(path)) if path is not None else {}
    for key in _KEYS:
        env_value = env.get(ENV_PREFIX + key.upper())
        if env_value is not None:
            values[key] = env_value

    kwargs: dict = {}
    if "listen_address" in values:
        kwargs["listen_address"] = values["listen_address"]
    if "mode_default" in values:
        try:
            kwargs["mode_default"] = ConversionMode(values["mode_default"])
        except ValueError:
            raise ConfigError(f"mode_default must be one of "
                              f"{[m.value for m in ConversionMode]}") from None
    for key in ("issuer_key_path", "holder_key_path", "mapping_override_path"):
        if values.get(key):
            kwargs[key] = Path(values[key])
    if "registry_path" in values:
        kwargs["registry_path"] = Path(values["registry_path"])
    if "max_body_bytes" in values:
        try:
            kwargs["max_body_bytes"] = int(values["max_body_bytes"])
        except ValueError:
            raise ConfigError("max_body_bytes must be an integer") from None
    if "schema_id" in values:
        kwargs["schema_id"] = values["schema_id"]
    return ServiceConfig(**kwargs)
