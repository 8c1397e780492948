import pytest

from subgraph_lab.graphs import Graph, new_graph
from subgraph_lab.rng import Rng


@pytest.fixture
def rng():
    return Rng(20260811)


def petersen() -> Graph:
    """Outer C5, inner pentagram, spokes; girth 5."""
    edges = [(i, (i + 1) % 5) for i in range(5)]
    edges += [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    edges += [(i, 5 + i) for i in range(5)]
    return new_graph(10, edges)


def random_attributed_graph(rng: Rng, n: int, d: int, p: float = 0.4) -> Graph:
    from subgraph_lab.graphs import erdos_renyi

    g = erdos_renyi(n, p, rng.next_u64())
    if d == 0:
        return g
    return Graph(g.adjacency, rng.normals((n, d)))
