"""Tests for purify/config.py and purify/observability/."""

from __future__ import annotations

import logging

import pytest

from purify.config import Settings
from purify.observability.logging import RunIdFilter, bind_run_id, configure_logging
from purify.observability.metrics import write_metrics


class TestSettings:
    def test_environment_prefix(self, monkeypatch):
        monkeypatch.setenv("PURIFY_SAMPLES", "2048")
        monkeypatch.setenv("PURIFY_GRADIENT_MODE", "central")
        config = Settings()
        assert config.samples == 2048
        assert config.gradient_mode == "central"

    def test_threads_alias(self, monkeypatch):
        monkeypatch.delenv("PURIFY_THREADS", raising=False)
        monkeypatch.setenv("THREADS", "4")
        assert Settings().threads == 4

    def test_fd_step_range(self):
        with pytest.raises(ValueError, match="fd_step must lie"):
            Settings(fd_step=1e-2)

    def test_log_level_is_normalized(self):
        assert Settings(log_level="debug").log_level == "DEBUG"


class TestLogging:
    def test_filter_attaches_run_id(self):
        bind_run_id("abc123")
        record = logging.LogRecord("purify", logging.INFO, __file__, 1, "m", (), None)
        assert RunIdFilter().filter(record)
        assert record.run_id == "abc123"

    def test_generated_run_id(self):
        assert len(bind_run_id()) == 12

    @pytest.mark.parametrize("json_output", [True, False])
    def test_configure(self, json_output):
        configure_logging("WARNING", json_output=json_output)
        assert logging.getLogger().level == logging.WARNING
        assert logging.getLogger("scipy").level == logging.WARNING


class TestMetrics:
    def test_write_metrics(self, tmp_path):
        path = tmp_path / "nested" / "metrics.prom"
        write_metrics(path)
        assert "purify_best_cost" in path.read_text()
