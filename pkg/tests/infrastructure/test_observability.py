import json
import logging
import threading

import pytest

from chainhydro.infrastructure.observability import (
    Timer,
    current_context,
    get_metrics_summary,
    get_registry,
    increment_counter,
    log_context,
    log_exception,
    record_cell,
)
from chainhydro.infrastructure.observability.logging import ContextualFormatter, JsonFormatter


def _record(message: str = "evolving", level: int = logging.INFO) -> logging.LogRecord:
    return logging.LogRecord("chainhydro.test", level, __file__, 1, message, (), None)


class TestLogContext:
    def test_nesting_and_restore(self):
        assert current_context() == {}
        with log_context(experiment="spectrum"):
            with log_context(n=64, seed=3):
                assert current_context() == {"experiment": "spectrum", "n": 64, "seed": 3}
            assert current_context() == {"experiment": "spectrum"}
        assert current_context() == {}

    def test_restored_after_error(self):
        with pytest.raises(RuntimeError):
            with log_context(n=8):
                raise RuntimeError("boom")
        assert current_context() == {}


class TestFormatters:
    def test_contextual_suffix(self):
        formatter = ContextualFormatter("%(message)s")
        assert formatter.format(_record()) == "evolving"
        with log_context(n=32, seed=1):
            assert formatter.format(_record()) == "evolving [n=32 seed=1]"

    def test_json_lines(self):
        formatter = JsonFormatter()
        with log_context(experiment="euler-solve", n=65):
            payload = json.loads(formatter.format(_record("solved", logging.WARNING)))
        assert payload["message"] == "solved"
        assert payload["level"] == "WARNING"
        assert payload["logger"] == "chainhydro.test"
        assert payload["experiment"] == "euler-solve"
        assert payload["n"] == 65


def test_log_exception_carries_context(caplog):
    logger = logging.getLogger("chainhydro.test.errors")
    seen = []

    class Capture(logging.Handler):
        def emit(self, record):
            seen.append(current_context())

    handler = Capture()
    logger.addHandler(handler)
    try:
        with caplog.at_level(logging.ERROR):
            log_exception(logger, "Cell failed", ValueError("bad"), n=16, seed=2)
    finally:
        logger.removeHandler(handler)
    assert "Cell failed: bad" in caplog.text
    assert seen == [{"n": 16, "seed": 2}]
    assert caplog.records[-1].exc_info is not None


class TestMetrics:
    def test_counters_with_labels(self):
        increment_counter("things_total")
        increment_counter("things_total", 2.0)
        increment_counter("things_total", labels={"kind": "a"})
        summary = get_metrics_summary()
        assert summary["things_total"] == 3.0
        assert summary["things_total{kind=a}"] == 1.0

    def test_record_cell(self):
        record_cell("spectrum", "ok", 0.5)
        record_cell("spectrum", "ok", 1.5)
        record_cell("spectrum", "failed", 0.1)
        summary = get_metrics_summary()
        assert summary["cells_total{experiment=spectrum,status=ok}"] == 2.0
        assert summary["cells_total{experiment=spectrum,status=failed}"] == 1.0
        stats = summary["cell_duration_seconds{experiment=spectrum}"]
        assert stats["count"] == 3
        assert stats["max"] == pytest.approx(1.5)
        assert stats["avg"] == pytest.approx(0.7)

    def test_timer(self):
        with Timer("block_seconds", labels={"step": "x"}) as timer:
            sum(range(1000))
        assert timer.elapsed >= 0.0
        stats = get_registry().histogram("block_seconds").get_stats({"step": "x"})
        assert stats["count"] == 1
        assert stats["sum"] == pytest.approx(timer.elapsed)

    def test_empty_histogram_stats(self):
        assert get_registry().histogram("unused").get_stats() == {
            "count": 0,
            "sum": 0.0,
            "avg": 0.0,
            "max": 0.0,
        }

    def test_concurrent_increments(self):
        def bump():
            for _ in range(1000):
                increment_counter("racy_total")

        threads = [threading.Thread(target=bump) for _ in range(4)]
        for thread in threads:
            thread.start()
        for thread in threads:
            thread.join()
        assert get_metrics_summary()["racy_total"] == 4000.0

    def test_reset(self):
        increment_counter("gone_total")
        get_registry().reset()
        assert get_metrics_summary() == {}
