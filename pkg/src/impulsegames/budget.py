"""Budget-capped play via state augmentation.

Each player gets a counter of remaining interventions; the counter rides
along in the state, drops by one whenever that player's costly action
executes, and once it hits zero the player's non-null actions are masked
out of the augmented game.  Masking (rather than punishing violations with
infinite rewards) keeps every trajectory feasible by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .game import ImpulseGame
from .sim import Trajectory, simulate
from .solver import EquilibriumPolicy, SolveReport, solve


@dataclass(frozen=True)
class AugmentedGame:
    """A base game lifted onto states ``(s, y, z)``.

    ``y`` counts Player 1's remaining interventions (``0..n1``), ``z``
    Player 2's.  ``game`` is the materialised dense model over the product
    space; ``labels[x]`` recovers the triple behind flat index ``x``.
    """

    base: ImpulseGame
    n1: int
    n2: int
    game: ImpulseGame
    labels: tuple

    def index(self, s: int, y: int, z: int) -> int:
        return (s * (self.n1 + 1) + y) * (self.n2 + 1) + z

    @property
    def num_states(self) -> int:
        return self.game.num_states

    def value_grid(self, value) -> np.ndarray:
        """Reshape a flat augmented field to ``(s, y, z)`` axes."""
        return np.asarray(value).reshape(
            self.base.num_states, self.n1 + 1, self.n2 + 1)


def augment(base: ImpulseGame, n1: int, n2: int) -> AugmentedGame:
    """Materialise the budgeted game over the counter-augmented state space.

    Transitions factor as the base kernel times deterministic counter
    bookkeeping; actions that would overdraw a counter are masked at those
    states, so the counters can never go negative.
    """
    if n1 < 0 or n2 < 0:
        raise ValueError("budgets must be nonnegative")
    ns, na, nb = base.num_states, base.num_actions1, base.num_actions2
    ny, nz = n1 + 1, n2 + 1
    nx = ns * ny * nz
    kernel = np.zeros((nx, na, nb, nx))
    reward = np.empty((nx, na, nb))
    cost1 = np.empty((nx, na))
    cost2 = np.empty((nx, nb))
    mask1 = np.zeros((nx, na), dtype=bool)
    mask2 = np.zeros((nx, nb), dtype=bool)
    labels = []
    rows = np.arange(ns)
    for s in range(ns):
        for y in range(ny):
            for z in range(nz):
                labels.append((s, y, z))
    idx = lambda y, z: (rows * ny + y) * nz + z
    for y in range(ny):
        for z in range(nz):
            src = idx(y, z)
            reward[src] = base.reward
            cost1[src] = base.cost1
            cost2[src] = base.cost2
            mask1[src, 0] = True
            mask2[src, 0] = True
            if y > 0:
                mask1[src, 1:] = base.mask1[:, 1:]
            if z > 0:
                mask2[src, 1:] = base.mask2[:, 1:]
            for a in range(na):
                y2 = max(y - 1, 0) if a != 0 else y
                for b in range(nb):
                    z2 = max(z - 1, 0) if b != 0 else z
                    dst = idx(y2, z2)
                    kernel[src[:, None], a, b, dst[None, :]] = base.kernel[:, a, b, :]
    game = ImpulseGame(kernel=kernel, reward=reward, cost1=cost1, cost2=cost2,
                       cost_floor=base.cost_floor, discount=base.discount,
                       mask1=mask1, mask2=mask2)
    return AugmentedGame(base=base, n1=n1, n2=n2, game=game, labels=tuple(labels))


def solve_budgeted(base: ImpulseGame, n1: int, n2: int, tol: float = 1e-9,
                   max_sweeps: int = 100_000) -> tuple[SolveReport, AugmentedGame]:
    """Solve the augmented game; the policy is Markov in ``(s, y, z)``."""
    aug = augment(base, n1, n2)
    return solve(aug.game, tol=tol, max_sweeps=max_sweeps), aug


class BudgetRun(NamedTuple):
    trajectory: Trajectory
    p1_interventions: int
    p2_interventions: int


def simulate_budgeted(aug: AugmentedGame, policy: EquilibriumPolicy, steps: int,
                      seed=0, start=None) -> BudgetRun:
    """Roll the augmented policy forward and hard-check budget feasibility.

    ``start`` is a base-game state (counters begin full) or None for state 0.
    A masked-action attempt or an intervention count beyond its budget
    raises: both indicate a solver bug rather than bad data.
    """
    s0 = aug.index(int(start) if start is not None else 0, aug.n1, aug.n2)
    traj = simulate(aug.game, policy, steps, seed=seed, start=s0)
    used1 = int(np.count_nonzero(traj.actions1))
    used2 = int(np.count_nonzero(traj.actions2))
    if used1 > aug.n1 or used2 > aug.n2:
        raise RuntimeError(
            f"budget violated: ({used1}, {used2}) interventions against "
            f"budgets ({aug.n1}, {aug.n2})")
    return BudgetRun(trajectory=traj, p1_interventions=used1, p2_interventions=used2)
