import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from specmix import corpus


@pytest.fixture(scope="session")
def curated():
    return corpus.curated_instances()


@pytest.fixture(scope="session")
def random_corpus_small():
    return corpus.random_small_corpus(40, seed=321)


@pytest.fixture(scope="session")
def acceptance_corpus():
    return corpus.random_small_corpus(200, seed=20240)
