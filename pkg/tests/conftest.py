import os
from pathlib import Path

import pytest


@pytest.fixture(scope="session")
def data_dir() -> Path:
    """Root directory holding the real public datasets, if downloaded."""
    return Path(os.environ.get("TRACLET_DATA_DIR", "/root/data"))
