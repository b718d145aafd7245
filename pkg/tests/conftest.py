"""
Shared fixtures: the two reference networks and the games built on them.
"""
import json

import pytest

from src.config import get_settings
from src.services.models import Externality, GameSpec
from src.services.network import Graph, generate
from src.services.weighting import WeightingSpec

TEN_NODE_EDGES = [
    (1, 4), (2, 5), (3, 6), (4, 5), (4, 6), (5, 6),
    (4, 7), (5, 7), (6, 7), (7, 8), (8, 9), (8, 10),
]

REGULAR4_EDGES = [
    (1, 2), (1, 3), (1, 5), (1, 6), (2, 3), (2, 4),
    (2, 6), (3, 4), (3, 5), (4, 5), (4, 6), (5, 6),
]

# Ten-node equilibrium: leaves 2(1 - X(2)), node 7 at 5(1 - X(5)), hubs at zero
TEN_NODE_PROFILE = [0.4095, 0.4095, 0.4095, 0.0, 0.0, 0.0, 0.1442, 0.0, 0.4095, 0.4095]


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    """Every test sees default settings, untouched by the developer's environment."""
    for name in ("NETSEC_LOG", "NETSEC_REDIS_URL", "NETSEC_BRD_TOL", "NETSEC_VERIFY_TOL"):
        monkeypatch.delenv(name, raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def ten_node_graph() -> Graph:
    return Graph.from_edges(10, TEN_NODE_EDGES)


@pytest.fixture
def regular4_graph() -> Graph:
    return Graph.from_edges(6, REGULAR4_EDGES)


@pytest.fixture
def ten_node_game(ten_node_graph) -> GameSpec:
    """Ten-node network, Prelec 0.6, c/L = 0.45, total effort."""
    return GameSpec.homogeneous(ten_node_graph, WeightingSpec.prelec(0.6), c=0.45)


@pytest.fixture
def cycle_game() -> GameSpec:
    """cycle(6), Prelec 0.4, c/L = 0.3."""
    return GameSpec.homogeneous(generate("cycle", 6), WeightingSpec.prelec(0.4), c=0.3)


@pytest.fixture
def weakest_link_cycle() -> GameSpec:
    return GameSpec.homogeneous(generate("cycle", 6), WeightingSpec.prelec(0.6), c=0.9, externality=Externality.WEAKEST_LINK)


@pytest.fixture
def write_config(tmp_path):
    """Write a game configuration dict to a JSON file and return its path."""
    def _write(document: dict, name: str = "game.json"):
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return path
    return _write


@pytest.fixture
def ten_node_config() -> dict:
    return {
        "graph": {"edge_list": [list(e) for e in TEN_NODE_EDGES]},
        "players": {"homogeneous": {"alpha": 0.6, "c": 0.45, "L": 1.0}},
        "externality": "total_effort",
    }
