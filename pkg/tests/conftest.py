import pytest

from corpus_files import CORPUS, read
from vucfm_kit.dsl import parse


@pytest.fixture(scope="session")
def set_text() -> str:
    return read("set.vucfm")


@pytest.fixture(scope="session")
def set_model(set_text):
    return parse(set_text)


@pytest.fixture(scope="session")
def corpus_models():
    return {p.name: parse(p.read_text(encoding="utf-8")) for p in sorted(CORPUS.glob("*.vucfm")) if p.name != "broken.vucfm"}
