import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import example_instance  # noqa: E402

DATA = Path(__file__).parent / "data"


@pytest.fixture
def example():
    return example_instance()


@pytest.fixture
def data_dir():
    return DATA
