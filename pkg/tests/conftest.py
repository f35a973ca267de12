import numpy as np
import pytest

from coevnet import AgentParams, PopulationState, TwoLayerNetwork, WeightedGraph
from coevnet.genesis import random_symmetric_stochastic


@pytest.fixture
def two_node_net() -> TwoLayerNetwork:
    """Single-layer pair graph: each agent fully weighs the other."""
    return TwoLayerNetwork.single_layer(WeightedGraph(np.array([[0.0, 1.0], [1.0, 0.0]])))


def rand_net(n: int, seed: int, same_layers: bool = False) -> TwoLayerNetwork:
    a = random_symmetric_stochastic(n, seed)
    if same_layers:
        return TwoLayerNetwork.single_layer(a)
    return TwoLayerNetwork(A=a, W=random_symmetric_stochastic(n, seed + 100_000))


def rand_state(n: int, rng: np.random.Generator) -> PopulationState:
    return PopulationState(
        actions=rng.integers(0, 2, n) * 2 - 1,
        opinions=rng.uniform(-1.0, 1.0, n),
    )


def uniform_params(n: int, lam: float, beta: float, eps: int, alpha: float = 0.0) -> AgentParams:
    return AgentParams.uniform(n, lam, beta, eps, alpha)
