import pytest

from narrshift.fragments import FrameMap, HashedNgramEmbedder
from narrshift.synthgen import build_pool


@pytest.fixture(scope="session")
def pool():
    return build_pool()


@pytest.fixture(scope="session")
def frame_map():
    return FrameMap.bundled()


@pytest.fixture(scope="session")
def embedder():
    return HashedNgramEmbedder()
