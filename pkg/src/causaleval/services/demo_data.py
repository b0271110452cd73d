"""
Synthetic experiment log

A seeded stand-in for a continual-learning benchmark study: each row is one
training run described by its pretraining source, architecture, learning
algorithm and number of initial classes, with a continuous accuracy and a
binary "beats the baseline" outcome. The generating effects are exported so
estimated coefficients can be checked against the truth.
"""

import logging
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd
from scipy import special

logger = logging.getLogger(__name__)

DEMO_SEED = 20240611
DEMO_ROWS = 1248

PRETRAIN_LEVELS = ("external", "ssl", "supervised")
ARCH_LEVELS = ("cnn", "transformer")
ALGO_LEVELS = ("A", "B", "C")
INITIAL_CLASSES = (2, 5, 10, 20, 50)

# acc = intercept + effects + N(0, NOISE_SD²); reference levels are the
# lexicographically smallest ones
DEMO_EFFECTS = {
    "(Intercept)": 0.62,
    "algo=B": 0.03,
    "algo=C": -0.02,
    "arch=transformer": 0.05,
    "n_initial_classes": -0.002,
    "pretrain=ssl": 0.04,
    "pretrain=supervised": 0.02,
}
NOISE_SD = 0.03

# logit P(beats_baseline = 1)
DEMO_LOGIT_EFFECTS = {
    "(Intercept)": -0.4,
    "algo=B": 0.8,
    "arch=transformer": 1.1,
    "n_initial_classes": -0.03,
}


def generate_demo(n: int = DEMO_ROWS, seed: int = DEMO_SEED) -> pd.DataFrame:
    """Draw n runs with uniformly random factor levels"""
    rng = np.random.default_rng(seed)
    frame = pd.DataFrame(
        {
            "pretrain": rng.choice(PRETRAIN_LEVELS, size=n),
            "arch": rng.choice(ARCH_LEVELS, size=n),
            "algo": rng.choice(ALGO_LEVELS, size=n),
            "n_initial_classes": rng.choice(INITIAL_CLASSES, size=n),
        }
    )

    def indicator(column: str, level: str) -> np.ndarray:
        return (frame[column] == level).to_numpy(dtype=np.float64)

    classes = frame["n_initial_classes"].to_numpy(dtype=np.float64)
    acc = (
        DEMO_EFFECTS["(Intercept)"]
        + DEMO_EFFECTS["pretrain=ssl"] * indicator("pretrain", "ssl")
        + DEMO_EFFECTS["pretrain=supervised"] * indicator("pretrain", "supervised")
        + DEMO_EFFECTS["arch=transformer"] * indicator("arch", "transformer")
        + DEMO_EFFECTS["algo=B"] * indicator("algo", "B")
        + DEMO_EFFECTS["algo=C"] * indicator("algo", "C")
        + DEMO_EFFECTS["n_initial_classes"] * classes
        + rng.normal(0.0, NOISE_SD, size=n)
    )
    eta = (
        DEMO_LOGIT_EFFECTS["(Intercept)"]
        + DEMO_LOGIT_EFFECTS["arch=transformer"] * indicator("arch", "transformer")
        + DEMO_LOGIT_EFFECTS["algo=B"] * indicator("algo", "B")
        + DEMO_LOGIT_EFFECTS["n_initial_classes"] * classes
    )
    frame["acc"] = np.round(acc, 6)
    frame["beats_baseline"] = (rng.random(n) < special.expit(eta)).astype(int)
    return frame


def write_demo_csv(path: Union[str, Path], n: int = DEMO_ROWS, seed: int = DEMO_SEED) -> Path:
    """Write the synthetic log as CSV and return its path"""
    path = Path(path)
    generate_demo(n, seed).to_csv(path, index=False, lineterminator="\n")
    logger.info(f"Wrote {n} synthetic runs to {path}")
    return path
