"""Shared fixtures: tiny images plus a session-scoped synthetic corpus.

The corpus trio (clean / degraded / invariance), its enrolled registry and
a trained calibration model are built once per session; they back the
pipeline tests and the acceptance suite.
"""

import numpy as np
import pytest

from docid import pipeline, synth
from docid.calibration import load_model
from docid.imaging import Image


@pytest.fixture
def white_rgb():
    return Image(np.full((8, 8, 3), 255, dtype=np.uint8))


@pytest.fixture
def gradient_gray():
    g = np.linspace(0, 255, 32 * 32).reshape(32, 32)
    return Image(np.floor(g + 0.5).astype(np.uint8))


@pytest.fixture(scope="session")
def corpus_root(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpora")
    synth.gen_corpus(root / "clean", samples_per_class=5, seed=7, kind="clean")
    synth.gen_corpus(root / "degraded", samples_per_class=6, seed=11,
                     kind="degraded")
    synth.gen_corpus(root / "invariance", seed=13, kind="invariance")
    return root


@pytest.fixture(scope="session")
def registry_dir(corpus_root, tmp_path_factory):
    reg = tmp_path_factory.mktemp("registry")
    pipeline.enroll(corpus_root / "clean" / "manifest.json", reg)
    return reg


@pytest.fixture(scope="session")
def registry(registry_dir):
    return pipeline.load_registry(registry_dir)


@pytest.fixture(scope="session")
def model_path(corpus_root, registry, tmp_path_factory):
    out = tmp_path_factory.mktemp("model") / "model.json"
    pipeline.train_calibration(corpus_root / "clean", registry, out)
    return out


@pytest.fixture(scope="session")
def model(model_path):
    return load_model(model_path)
