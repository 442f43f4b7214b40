from __future__ import annotations

import io
from pathlib import Path

import pytest

DATA_DIR = Path(__file__).resolve().parent / "data"


@pytest.fixture(scope="session")
def fixture_dir() -> Path:
    return DATA_DIR / "fixture"


@pytest.fixture(scope="session")
def golden_dir() -> Path:
    return DATA_DIR / "golden"


@pytest.fixture()
def out_dir(tmp_path: Path) -> Path:
    d = tmp_path / "out"
    d.mkdir()
    return d


def read_csv_text(path: Path) -> str:
    return path.read_text(encoding="utf-8")


def string_stream(text: str) -> io.StringIO:
    return io.StringIO(text)
