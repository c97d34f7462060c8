import logging

import pytest

from defining_sets.state_matrix import BinaryMatrix


@pytest.fixture(autouse=True)
def isolated_run_log(tmp_path, monkeypatch):
    """Send run logs to a per-test directory and drop handlers afterwards."""
    monkeypatch.setenv("DEFSETS_LOG_DIR", str(tmp_path / "logs"))
    yield tmp_path / "logs"
    run_logger = logging.getLogger("defining_sets")
    for handler in list(run_logger.handlers):
        handler.close()
        run_logger.removeHandler(handler)


@pytest.fixture
def identity2():
    return BinaryMatrix.identity(2)


@pytest.fixture
def identity3():
    return BinaryMatrix.identity(3)
