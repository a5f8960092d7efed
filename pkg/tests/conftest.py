import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from discusskit.demo import build_demo_heads, load_sample_discussion
from discusskit.embedding import DeterministicBackend
from discusskit.features import WindowConfig

TEST_DIM = 16


@pytest.fixture(scope="session")
def backend():
    return DeterministicBackend(TEST_DIM)


@pytest.fixture(scope="session")
def sample_discussion():
    return load_sample_discussion()


@pytest.fixture(scope="session")
def demo_heads(backend):
    return build_demo_heads(backend, WindowConfig(), seed=7)
