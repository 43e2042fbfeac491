import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tracekit.corpus import gen_corpus


@pytest.fixture(scope="session")
def small_corpus():
    return gen_corpus(seed=11, n_problems=10, variants_per_problem=3)
