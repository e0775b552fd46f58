import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make helpers importable

from chainloom.fixtures import fig1_path
from chainloom.template_io import parse_template


@pytest.fixture(scope="session")
def fig1_text() -> str:
    return fig1_path().read_text("utf-8")


@pytest.fixture()
def fig1(fig1_text):
    return parse_template(fig1_text)
