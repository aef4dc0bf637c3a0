"""Shared fixtures over the data in support.py.

Test modules import constants and stand-ins from `support` (not from this
module): this suite shares a pytest run with service/tests, and since
neither directory is a package, `conftest` is not a unique module name
across the two — `support` is.
"""

from __future__ import annotations

import pytest

from buspo.encoder import StaticEncoder
from buspo.lexicon import Resources, load_resources
from buspo.victim import ClassifierHandle

from support import (
    EMBEDDINGS_TXT,
    NE_TSV,
    POS_TSV,
    SEMEMES_TSV,
    SYNONYMS_TSV,
    TEN_DOC_DATASET,
    make_sentiment_model,
    write_jsonl,
)


@pytest.fixture(scope="session")
def resource_dir(tmp_path_factory):
    directory = tmp_path_factory.mktemp("resources")
    (directory / "synonyms.tsv").write_text(SYNONYMS_TSV, encoding="utf-8")
    (directory / "sememes.tsv").write_text(SEMEMES_TSV, encoding="utf-8")
    (directory / "ne.tsv").write_text(NE_TSV, encoding="utf-8")
    (directory / "pos.tsv").write_text(POS_TSV, encoding="utf-8")
    (directory / "embeddings.txt").write_text(EMBEDDINGS_TXT, encoding="utf-8")
    return directory


@pytest.fixture(scope="session")
def resources(resource_dir) -> Resources:
    return load_resources(
        synonyms_path=resource_dir / "synonyms.tsv",
        sememes_path=resource_dir / "sememes.tsv",
        ne_path=resource_dir / "ne.tsv",
        pos_path=resource_dir / "pos.tsv",
    )


@pytest.fixture(scope="session")
def static_encoder(resource_dir) -> StaticEncoder:
    return StaticEncoder.from_file(resource_dir / "embeddings.txt")


@pytest.fixture
def sentiment_handle() -> ClassifierHandle:
    # Function-scoped: each test gets a fresh query counter.
    return ClassifierHandle(make_sentiment_model())


@pytest.fixture
def ten_doc_dataset(tmp_path):
    path = tmp_path / "dataset.jsonl"
    write_jsonl(path, TEN_DOC_DATASET)
    return path
