"""Tests for purify/utils/config_loader.py."""

from __future__ import annotations

from pathlib import Path

import pytest

from purify.errors import ConfigError
from purify.utils.config_loader import load_document, load_mapping


class TestLoadDocument:
    """JSON and YAML run documents."""

    def test_load_yaml_file(self, tmp_path):
        """A YAML mapping is parsed into a dict."""
        yml = tmp_path / "run.yaml"
        yml.write_text("family: qr\nsamples: 64\n")
        assert load_document(yml) == {"family": "qr", "samples": 64}

    def test_load_json_file(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text('{"family": "maz", "iterations": 2}')
        assert load_document(path) == {"family": "maz", "iterations": 2}

    def test_load_missing_file(self):
        """Unreadable paths surface as configuration errors."""
        with pytest.raises(ConfigError, match="cannot read"):
            load_document(Path("/nonexistent/missing.yaml"))

    def test_load_yaml_with_crlf(self, tmp_path):
        """Windows line endings are normalized before parsing."""
        yml = tmp_path / "crlf.yaml"
        yml.write_bytes(b"family: werner\r\nseed: 3\r\n")
        assert load_document(yml) == {"family": "werner", "seed": 3}

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{family: ")
        with pytest.raises(ConfigError, match="cannot parse"):
            load_document(path)


class TestLoadMapping:
    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.yaml"
        path.write_text("")
        assert load_mapping(path) == {}

    def test_rejects_lists(self, tmp_path):
        path = tmp_path / "list.yaml"
        path.write_text("- 1\n- 2\n")
        with pytest.raises(ConfigError, match="mapping"):
            load_mapping(path)
