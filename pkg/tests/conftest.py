import pathlib
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

from netsieve import Graph, load_graph

DATA_DIR = pathlib.Path(__file__).parent / "data"

# Ports used throughout for the bundled 6-node example.
EXAMPLE_PORTS = (1, 2, 3)


@pytest.fixture(scope="session")
def six_node() -> Graph:
    """The 6-node example graph recovered by the exhaustive oracle search."""
    return load_graph(DATA_DIR / "six_node.json")


@pytest.fixture(scope="session")
def six_node_path() -> pathlib.Path:
    return DATA_DIR / "six_node.json"
