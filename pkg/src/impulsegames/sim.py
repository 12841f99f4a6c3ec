"""Seeded policy rollouts on the game model."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .game import ImpulseGame, effective_reward
from .solver import EquilibriumPolicy


@dataclass(frozen=True)
class Trajectory:
    """One rollout: visited states, executed pairs and realised net rewards.

    ``states`` has one more entry than the rest (the landing state is kept).
    ``cumulative`` holds the running discounted return, so its last entry is
    the realised discounted return of the whole rollout.
    """

    states: np.ndarray
    actions1: np.ndarray
    actions2: np.ndarray
    rewards: np.ndarray
    cumulative: np.ndarray

    @property
    def discounted_return(self) -> float:
        return float(self.cumulative[-1]) if len(self.cumulative) else 0.0


def simulate(game: ImpulseGame, policy: EquilibriumPolicy, steps: int,
             seed=0, start: int = 0, rng=None) -> Trajectory:
    """Roll the policy forward ``steps`` steps from ``start``.

    Player 2's action takes precedence wherever both flags are raised.  An
    attempt to execute a masked action is a hard fault, since a correctly
    extracted policy never selects one.
    """
    rng = np.random.default_rng(seed) if rng is None else rng
    cum_kernel = np.cumsum(game.kernel, axis=3)
    s = int(start)
    states = np.empty(steps + 1, dtype=int)
    acts1 = np.empty(steps, dtype=int)
    acts2 = np.empty(steps, dtype=int)
    rewards = np.empty(steps)
    states[0] = s
    g = game.discount
    disc = 1.0
    cumulative = np.empty(steps)
    total = 0.0
    for t in range(steps):
        a, b = policy.executed_pair(s)
        if (a != 0 and not game.mask1[s, a]) or (b != 0 and not game.mask2[s, b]):
            raise RuntimeError(
                f"policy executed a masked action ({a}, {b}) at state {s}")
        r = effective_reward(game, s, (a, b))
        acts1[t], acts2[t], rewards[t] = a, b, r
        total += disc * r
        cumulative[t] = total
        disc *= g
        s = int(np.searchsorted(cum_kernel[s, a, b], rng.random(), side="right"))
        s = min(s, game.num_states - 1)
        states[t + 1] = s
    return Trajectory(states=states, actions1=acts1, actions2=acts2,
                      rewards=rewards, cumulative=cumulative)
