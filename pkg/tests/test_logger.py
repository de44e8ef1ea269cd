"""Tests for the loguru setup and the operation summaries."""

from dataclasses import dataclass, field
from typing import List

import pytest
from loguru import logger

from emptiness.core.errors import BudgetExceededError
from emptiness.core.logger import log_function_call, log_run, setup_logger


@pytest.fixture
def captured():
    messages = []
    logger.remove()
    sink = logger.add(lambda message: messages.append(message.record), level="DEBUG")
    yield messages
    logger.remove(sink)
    logger.add(lambda message: None, level="WARNING")


@pytest.fixture(autouse=True)
def restore_sinks():
    yield
    logger.remove()
    logger.add(lambda message: None, level="WARNING")


@dataclass
class FakeScan:
    route: str
    rows: List[int] = field(default_factory=list)


def test_console_only_writes_no_files(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    setup_logger()
    logger.info("hello")
    assert not (tmp_path / "logs").exists()


def test_file_sinks(tmp_path):
    log_dir = tmp_path / "nested"
    setup_logger(verbose=True, file_logging=True, log_dir=str(log_dir))
    logger.debug("detail")
    logger.error("broken")
    logger.remove()
    assert "detail" in (log_dir / "emptiness.log").read_text()
    errors = (log_dir / "emptiness_errors.log").read_text()
    assert "broken" in errors
    assert "detail" not in errors


def test_log_run_binds_metrics(captured):
    log_run("efp", 0.25, route="exact", rows=3)
    record = captured[-1]
    assert record["level"].name == "INFO"
    assert record["extra"] == {"operation": "efp", "duration": 0.25, "route": "exact", "rows": 3}
    assert record["message"] == "efp finished in 0.250s (route=exact, rows=3)"


def test_log_run_without_metrics(captured):
    log_run("verify", 1.5)
    assert captured[-1]["message"] == "verify finished in 1.500s"


def test_decorated_scan_reports_rows(captured):
    @log_function_call
    def scan():
        return FakeScan(route="mc", rows=[1, 2, 3])

    result = scan()
    assert result.rows == [1, 2, 3]
    assert scan.__name__ == "scan"
    assert captured[0]["level"].name == "DEBUG"
    assert captured[0]["extra"] == {"operation": "scan"}
    summary = captured[-1]["extra"]
    assert summary["rows"] == 3
    assert summary["route"] == "mc"


def test_budget_errors_are_warnings(captured):
    @log_function_call
    def efp():
        raise BudgetExceededError("dense Hamiltonian", 1 << 40, 1 << 30)

    with pytest.raises(BudgetExceededError):
        efp()
    record = captured[-1]
    assert record["level"].name == "WARNING"
    assert record["extra"]["error"] == "BudgetExceededError"
    assert record["message"].startswith("efp rejected: dense Hamiltonian needs about")


def test_unexpected_errors_are_errors(captured):
    @log_function_call
    def fail():
        raise RuntimeError("nope")

    with pytest.raises(RuntimeError):
        fail()
    assert captured[-1]["level"].name == "ERROR"
    assert captured[-1]["message"] == "fail failed: nope"
