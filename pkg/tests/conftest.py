import logging

import numpy as np
import pytest

import multit as mt

# the degenerate-row warning is expected in single-row shell-reference cases
logging.getLogger("multit.normalization").setLevel(logging.ERROR)


@pytest.fixture
def planted():
    """Well-separated planted dataset with known ground truth (seeded)."""
    dataset = mt.synth_benchmark(400, 300, 32, 10.0, 7, n_clusters=2,
                                 outlier_sigma=1.0, center_scale=6.0)
    X, y = mt.build_target(dataset, mt.TargetDatasetSpec(0, 0.1, 11))
    return X, y


def domain_matrix(seed: int, n_in=60, n_pool=40, d=8, spread=6.0, gamma=0.15,
                  n_clusters=2, outlier_sigma=1.0, center_scale=4.0):
    """Small contaminated matrix drawn from the benchmark family."""
    dataset = mt.synth_benchmark(n_in, n_pool, d, spread, seed,
                                 n_clusters=n_clusters, outlier_sigma=outlier_sigma,
                                 center_scale=center_scale)
    X, y = mt.build_target(dataset, mt.TargetDatasetSpec(0, gamma, seed + 1))
    return X, y
