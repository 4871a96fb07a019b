import sys
from pathlib import Path

import pytest

REPO = Path(__file__).resolve().parents[1]
FIXTURES = REPO / "fixtures"
ELMO_DIR = FIXTURES / "elmo"
GOLDEN_DIR = FIXTURES / "golden"
KEYS_DIR = FIXTURES / "keys"

# the pure-Python oracle lives next to the experiment scripts
sys.path.insert(0, str(REPO / "scripts"))

from elmo2eds.standards import load_registries  # noqa: E402


@pytest.fixture(scope="session")
def registries():
    return load_registries()


@pytest.fixture(scope="session")
def elmo_bytes():
    def read(stem: str) -> bytes:
        return (ELMO_DIR / f"{stem}.xml").read_bytes()
    return read


@pytest.fixture(scope="session")
def golden_bytes():
    def read(name: str) -> bytes:
        return (GOLDEN_DIR / name).read_bytes()
    return read


def corpus_paths():
    """Every ELMO fixture document."""
    return sorted(ELMO_DIR.glob("*.xml"))


def convertible_corpus_paths():
    """Corpus documents that validate with zero errors (bad_country.xml is
    the deliberate negative case)."""
    return [p for p in corpus_paths() if p.name != "bad_country.xml"]
