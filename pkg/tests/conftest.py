"""Shared fixtures for the causaleval test suite"""

from pathlib import Path

import numpy as np
import pytest

from causaleval.analysis.dataset import from_mapping
from causaleval.models.dataset import Dataset
from causaleval.services.demo_data import generate_demo


def make_dataset(**columns) -> Dataset:
    """Dataset from keyword columns; numeric sequences become continuous"""
    return from_mapping({name: np.asarray(values) for name, values in columns.items()})


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def linear_dataset(rng) -> Dataset:
    """y = 1 + 2x + N(0, 0.25) on 60 rows, plus a three-level factor without effect"""
    n = 60
    x = rng.uniform(-2.0, 2.0, n)
    g = np.array(["a", "b", "c"] * (n // 3), dtype=object)
    y = 1.0 + 2.0 * x + rng.normal(0.0, 0.5, n)
    return make_dataset(y=y, x=x, g=g)


@pytest.fixture
def logit_dataset(rng) -> Dataset:
    """Bernoulli outcome with logit P = -0.5 + 1.2 x + 0.8 [g = b]"""
    n = 400
    x = rng.normal(0.0, 1.0, n)
    g = rng.choice(np.array(["a", "b"], dtype=object), size=n)
    eta = -0.5 + 1.2 * x + 0.8 * (g == "b")
    y = (rng.random(n) < 1.0 / (1.0 + np.exp(-eta))).astype(float)
    return make_dataset(y=y, x=x, g=g)


@pytest.fixture(scope="session")
def demo_frame():
    return generate_demo()


@pytest.fixture(scope="session")
def demo_dataset(demo_frame) -> Dataset:
    return from_mapping({name: demo_frame[name].to_numpy() for name in demo_frame.columns})


@pytest.fixture
def demo_csv(tmp_path, demo_frame) -> Path:
    path = tmp_path / "demo.csv"
    demo_frame.to_csv(path, index=False, lineterminator="\n")
    return path


@pytest.fixture
def write_csv(tmp_path):
    """Write CSV text to a file in tmp_path and return its path"""

    def _write(text: str, name: str = "data.csv") -> Path:
        path = tmp_path / name
        path.write_bytes(text.encode("utf-8"))
        return path

    return _write
