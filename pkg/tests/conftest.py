import numpy as np
import pytest

from csihar.data import DesignMatrix, assemble_design_matrix, load_dataset_dir
from csihar.synth import SynthConfig, generate_dataset

# small, fast dataset for unit tests; the acceptance suite builds the
# full-size one itself
TINY_CFG = SynthConfig(trace_length=32, noise_sigma=0.05, seed=7)


@pytest.fixture(scope="session")
def tiny_dataset_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("tiny_dataset")
    generate_dataset(TINY_CFG, 3, out)
    return out


@pytest.fixture(scope="session")
def tiny_matrix(tiny_dataset_dir) -> DesignMatrix:
    return assemble_design_matrix(load_dataset_dir(tiny_dataset_dir))


@pytest.fixture()
def blob_matrix() -> DesignMatrix:
    """Two well-separated Gaussian blobs, 10 rows per class."""
    rng = np.random.default_rng(3)
    a = rng.normal(loc=(-2.0, 0.0, 1.0, 0.0), scale=0.5, size=(10, 4))
    b = rng.normal(loc=(2.0, 0.0, -1.0, 0.0), scale=0.5, size=(10, 4))
    labels = ("sitting",) * 10 + ("standing",) * 10
    return DesignMatrix(labels=labels, rows=np.vstack([a, b]))
