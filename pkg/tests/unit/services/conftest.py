"""Fixtures for service tests."""

from pathlib import Path

import pytest

from .decode_logs import OUTPUTS, write_logs


@pytest.fixture
def decode_logs(tmp_path: Path) -> Path:
    """Decode logs of a 2 x 2 model for the shared references."""
    return write_logs(tmp_path / "decode", OUTPUTS)
