import numpy as np
import pytest

from impulsegames import ImpulseGame


def micro_game(cost1: float, cost2: float, gamma: float = 0.5) -> ImpulseGame:
    """Single self-looping state, one costly action per player.

    Rewards: 1 for the null pair, 2 for Player 1's action, 0 for Player 2's.
    """
    kernel = np.ones((1, 2, 2, 1))
    reward = np.zeros((1, 2, 2))
    reward[0, 0, 0] = 1.0
    reward[0, 1, 0] = 2.0
    return ImpulseGame(
        kernel=kernel, reward=reward,
        cost1=np.array([[0.0, cost1]]), cost2=np.array([[0.0, cost2]]),
        cost_floor=0.1, discount=gamma,
    )


@pytest.fixture
def g1() -> ImpulseGame:
    """Low costs both sides; Player 2 intervenes, value 0.6."""
    return micro_game(0.5, 0.3)


@pytest.fixture
def g2() -> ImpulseGame:
    """Player 2 priced out; Player 1 intervenes, value 3.0."""
    return micro_game(0.5, 100.0)


@pytest.fixture
def g3() -> ImpulseGame:
    """Both players priced out; uncontrolled chain, value 2.0."""
    return micro_game(2.0, 100.0)
