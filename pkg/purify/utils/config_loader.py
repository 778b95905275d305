"""JSON / YAML document loading with newline coercion."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import yaml

from purify.errors import ConfigError


def _coerce_newlines(raw: str) -> str:
    return raw.replace("\r\n", "\n").replace("\r", "\n")


def load_document(path: Path) -> Any:
    """Parse a ``.json`` file with :mod:`json`, anything else as YAML.

    YAML is a superset of JSON, so a JSON document with an unusual suffix
    still loads.
    """
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        if path.suffix.lower() == ".json":
            return json.loads(raw)
        return yaml.safe_load(_coerce_newlines(raw))
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc


def load_mapping(path: Path) -> dict[str, Any]:
    document = load_document(path)
    if document is None:
        return {}
    if not isinstance(document, dict):
        raise ConfigError(f"{path} must contain a mapping at top level")
    return document
