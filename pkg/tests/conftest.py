import shutil
from pathlib import Path

import pytest

from irrtor.rpsl import dedupe_latest, parse_bytes

DATA = Path(__file__).parent / "data"
SYNTHETIC = DATA / "synthetic"
GOLDEN = DATA / "golden"


def corpus_from_text(*texts, registry="TEST"):
    autnums, assets = [], []
    for text in texts:
        a, s, _ = parse_bytes(text.encode(), registry)
        autnums += a
        assets += s
    return dedupe_latest(autnums, assets)


@pytest.fixture
def synthetic_copy(tmp_path):
    """A private copy of the bundled corpus so outputs and caches stay in tmp."""
    dest = tmp_path / "synthetic"
    shutil.copytree(SYNTHETIC, dest)
    return dest
