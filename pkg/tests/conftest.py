import numpy as np
import pytest

from forge.surfaces import build_dataset, feature_matrix


@pytest.fixture(scope="session")
def d0_small():
    """30 spheres + 30 tori; shared across tests to amortize generation."""
    return build_dataset("D0", 30, seed=1234)


@pytest.fixture(scope="session")
def d0_small_fm(d0_small):
    return feature_matrix(d0_small)


@pytest.fixture(scope="session")
def d0_class_weights(d0_small):
    kinds = np.array([d.kind for d in d0_small])
    return {
        "sphere": (kinds == "sphere").astype(float),
        "torus": (kinds == "torus").astype(float),
    }
