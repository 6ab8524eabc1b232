import os
import subprocess
import sys
from pathlib import Path

# Must be set before any keras/tensorflow import anywhere in the test process.
os.environ.setdefault("TF_CPP_MIN_LOG_LEVEL", "3")

import pytest

from synth import write_corpus


def _run_builder(*args):
    """Run the dataset-builder CLI; returns CompletedProcess with text output."""
    return subprocess.run(
        [sys.executable, "-m", "traclet.cli", *args],
        capture_output=True,
        text=True,
    )


@pytest.fixture(scope="session")
def run_builder():
    return _run_builder


@pytest.fixture(scope="session")
def small_dataset(tmp_path_factory):
    """A small built dataset (3 classes, 36 trajectories, 32px images)."""
    root = tmp_path_factory.mktemp("small_ds")
    corpus = root / "corpus.csv"
    write_corpus(corpus, seed=11, per_class=12, n_points=40)
    raster = root / "raster.json"
    raster.write_text('{"n": 32}')
    out = root / "ds"
    proc = _run_builder(
        "build", "--dataset", "canonical-csv", "--input", str(corpus),
        "--out", str(out), "--seed", "3",
        "--raster-config", str(raster),
    )
    assert proc.returncode == 0, proc.stderr
    return out


@pytest.fixture(scope="session")
def small_manifest(small_dataset):
    return small_dataset / "manifest.txt"


@pytest.fixture(scope="session")
def data_dir():
    """Directory for real-world corpora; tests that need it skip when absent."""
    return Path(os.environ.get("TRACLET_DATA_DIR", "/root/data"))
