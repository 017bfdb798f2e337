from __future__ import annotations

from pathlib import Path

import pytest

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def corpus12_path() -> Path:
    return DATA_DIR / "corpus12.csv"


@pytest.fixture
def analyzed12(corpus12_path):
    from apibind.ingest import load_corpus
    from apibind.parse import parse_record
    from apibind.validate import cross_validate

    return [cross_validate(parse_record(r)) for r in load_corpus(corpus12_path)]
