# conftest.py

import io
from pathlib import Path
import textwrap

import pytest

from PolyAchieve.certificate_reader import data_path, read_polyform
from PolyAchieve.polyform import Polyform
from PolyAchieve.verify_logger import LogLevel, VerifyLogger, setup_logger


@pytest.fixture
def animal():
    """Loads a shipped polyform by catalog name, e.g. animal('T4,3')."""
    def load(name: str) -> Polyform:
        p = read_polyform(data_path("polyforms", name.replace(",", "_") + ".txt"))
        return Polyform(p.board, p.cells, name)
    return load


@pytest.fixture
def write_file(tmp_path):
    """Writes dedented text into tmp_path and returns the path."""
    def write(name: str, text: str) -> Path:
        path = tmp_path / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(textwrap.dedent(text).lstrip("\n"), encoding="utf-8")
        return path
    return write


@pytest.fixture
def captured_logger():
    """Installs a VerifyLogger writing into a StringIO buffer."""
    stream = io.StringIO()
    logger = VerifyLogger(stream, log_level=LogLevel.DEBUG)
    setup_logger(logger)
    yield logger, stream
    setup_logger(VerifyLogger(None))


@pytest.fixture(autouse=True)
def reset_logger():
    """Commands install a stdout logger; drop it so later tests never write to a closed capture."""
    yield
    setup_logger(VerifyLogger(None))
