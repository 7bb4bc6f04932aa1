import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gpd.graphs import SbmModel, normalize_adjacency, sample_sbm, spectral_decomposition


@pytest.fixture
def sbm_graph_64():
    model = SbmModel.balanced(64, 4, 0.8, 0.05)
    return sample_sbm(model, 7), model


@pytest.fixture
def path_graph_10():
    from gpd.graphs import Graph

    adjacency = np.zeros((10, 10))
    for i in range(9):
        adjacency[i, i + 1] = adjacency[i + 1, i] = 1.0
    return Graph(10, adjacency)


@pytest.fixture
def sbm_spectrum_64(sbm_graph_64):
    graph, _ = sbm_graph_64
    return spectral_decomposition(normalize_adjacency(graph))
