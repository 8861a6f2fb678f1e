import numpy as np
import pytest

from iscsim.datasets import blob_dataset
from iscsim.network import train_small_mlp


@pytest.fixture(scope="session")
def toy_data():
    """16-feature 4-class blobs, split 160 train / 80 test."""
    x, y = blob_dataset(4, 16, 60, seed=11)
    return x[:160], y[:160], x[160:], y[160:]


@pytest.fixture(scope="session")
def toy_net(toy_data):
    """16-8-8-4 network trained to near-zero training error."""
    xtr, ytr, _, _ = toy_data
    return train_small_mlp(xtr, ytr, [16, 8, 8, 4],
                           epochs=2000, lr=2.0, seed=5)
