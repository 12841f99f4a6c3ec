"""Concrete environments: an advertising-investment duopoly and sampling access.

The duopoly discretises two firms' sales levels onto a square lattice.  A
firm's costly action is an advertising investment that pulls untapped market
share its way; doing nothing lets its sales decay.  The scalar game reward is
the antisymmetric revenue difference, which makes the zero-sum accounting an
identity rather than an assumption.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .game import ImpulseGame


@dataclass(frozen=True)
class DuopolyParams:
    """Parameters of the discretised advertising duopoly.

    ``investments1``/``investments2`` are the non-null action magnitudes; the
    null action (invest nothing) is always present.  The action cost is
    quasi-linear: ``kappa_i + u`` for investment ``u``.  ``grid_size`` lattice
    points per axis span ``[0, market_size]``.
    """

    market_size: float = 100.0
    b1: float = 0.6
    b2: float = 0.6
    r1: float = 0.05
    r2: float = 0.05
    sigma1: float = 5.0
    sigma2: float = 5.0
    h_slope: float = 0.5
    kappa1: float = 0.2
    kappa2: float = 0.2
    investments1: tuple = (1.0, 2.5, 4.0)
    investments2: tuple = (1.0, 2.5, 4.0)
    grid_size: int = 11
    gamma: float = 0.9
    noise_nodes: int = 7

    def __post_init__(self):
        if self.market_size <= 0:
            raise ValueError("market_size must be positive")
        if not (0 < self.b1 <= 1 and 0 < self.b2 <= 1):
            raise ValueError("response rates must lie in (0, 1]")
        if self.grid_size < 2:
            raise ValueError("grid needs at least 2 points per axis")


def duopoly_params_from_dict(doc: dict) -> DuopolyParams:
    """Build parameters from a plain config block (e.g. parsed JSON)."""
    known = set(DuopolyParams.__dataclass_fields__)
    unknown = set(doc) - known
    if unknown:
        raise ValueError(f"unknown duopoly parameter(s): {sorted(unknown)}")
    doc = dict(doc)
    for key in ("investments1", "investments2"):
        if key in doc:
            doc[key] = tuple(doc[key])
    return DuopolyParams(**doc)


def duopoly_step_mean(params: DuopolyParams, s1: float, s2: float,
                      u1: float, u2: float) -> tuple[float, float]:
    """Deterministic next sales levels (noise handled separately), clamped."""
    m = params.market_size
    untapped = (m - s1 - s2) / m
    n1 = s1 + params.b1 * u1 * untapped - params.r1 * s1
    n2 = s2 + params.b2 * u2 * untapped - params.r2 * s2
    return (min(max(n1, 0.0), m), min(max(n2, 0.0), m))


def _axis_distribution(mean, sigma, grid, nodes, weights):
    """Lattice distribution of mean + sigma*N(0,1), shape (len(mean), G).

    Each quadrature node's clamped landing point spreads its mass over the
    two neighbouring lattice points by linear interpolation; the boundary
    absorbs the clamped tails.
    """
    g = len(grid)
    step = grid[1] - grid[0]
    x = np.clip(mean[:, None] + sigma * nodes[None, :], grid[0], grid[-1])
    pos = (x - grid[0]) / step
    lo = np.minimum(pos.astype(int), g - 2)
    frac = pos - lo
    out = np.zeros((len(mean), g))
    rows = np.repeat(np.arange(len(mean)), len(nodes))
    np.add.at(out, (rows, lo.ravel()), ((1.0 - frac) * weights[None, :]).ravel())
    np.add.at(out, (rows, lo.ravel() + 1), (frac * weights[None, :]).ravel())
    return out


def build_duopoly_game(params: DuopolyParams) -> ImpulseGame:
    """Materialise the duopoly as a dense game over the sales lattice.

    States enumerate lattice pairs row-major: state ``i*G + j`` holds
    ``(S1, S2) = (grid[i], grid[j])``.  Rewards are ``h_slope * (S1 - S2)``
    for every action pair; costs route through the game's cost tables and
    are not double counted inside the reward.
    """
    g = params.grid_size
    grid = np.linspace(0.0, params.market_size, g)
    s1 = np.repeat(grid, g)
    s2 = np.tile(grid, g)
    ns = g * g
    levels1 = (0.0,) + tuple(params.investments1)
    levels2 = (0.0,) + tuple(params.investments2)
    na, nb = len(levels1), len(levels2)

    if params.noise_nodes > 1:
        nodes, w = np.polynomial.hermite_e.hermegauss(params.noise_nodes)
        weights = w / w.sum()
    else:
        nodes, weights = np.zeros(1), np.ones(1)

    reward = np.broadcast_to(
        (params.h_slope * (s1 - s2))[:, None, None], (ns, na, nb)).copy()
    cost1 = np.zeros((ns, na))
    cost1[:, 1:] = params.kappa1 + np.asarray(params.investments1)[None, :]
    cost2 = np.zeros((ns, nb))
    cost2[:, 1:] = params.kappa2 + np.asarray(params.investments2)[None, :]

    kernel = np.empty((ns, na, nb, ns))
    m = params.market_size
    untapped = (m - s1 - s2) / m
    for ai, u1 in enumerate(levels1):
        for bi, u2 in enumerate(levels2):
            d1 = np.clip(s1 + params.b1 * u1 * untapped - params.r1 * s1, 0.0, m)
            d2 = np.clip(s2 + params.b2 * u2 * untapped - params.r2 * s2, 0.0, m)
            p1 = _axis_distribution(d1, params.sigma1, grid, nodes, weights)
            p2 = _axis_distribution(d2, params.sigma2, grid, nodes, weights)
            joint = np.einsum("si,sj->sij", p1, p2).reshape(ns, ns)
            kernel[:, ai, bi, :] = joint / joint.sum(axis=1, keepdims=True)

    floor = min(params.kappa1 + min(levels1[1:], default=1.0),
                params.kappa2 + min(levels2[1:], default=1.0))
    return ImpulseGame(kernel=kernel, reward=reward, cost1=cost1, cost2=cost2,
                       cost_floor=floor, discount=params.gamma)


class SamplingEnv:
    """Model-free access to a game: seeded reset/step, probabilities hidden.

    Exposes the static knowledge a learner legitimately owns (action counts,
    its own costs, masks, discount) while transitions and rewards are only
    reachable by sampling through :meth:`step`.
    """

    def __init__(self, game: ImpulseGame, seed=0, rng=None, reset_states=None):
        self._game = game
        self._cum = np.cumsum(game.kernel, axis=3)
        self._rng = np.random.default_rng(seed) if rng is None else rng
        self._reset_states = (np.arange(game.num_states) if reset_states is None
                              else np.asarray(reset_states, dtype=int))
        self.num_states = game.num_states
        self.num_actions1 = game.num_actions1
        self.num_actions2 = game.num_actions2
        self.cost1 = game.cost1
        self.cost2 = game.cost2
        self.mask1 = game.mask1
        self.mask2 = game.mask2
        self.discount = game.discount

    def reset(self) -> int:
        """Draw a fresh start state (uniform over the reset set by default)."""
        return int(self._reset_states[self._rng.integers(len(self._reset_states))])

    def step(self, s: int, pair) -> tuple[int, float]:
        """Sample the next state and return the raw (cost-exclusive) reward."""
        a, b = pair
        if (a != 0 and not self.mask1[s, a]) or (b != 0 and not self.mask2[s, b]):
            raise RuntimeError(f"masked action ({a}, {b}) attempted at state {s}")
        nxt = int(np.searchsorted(self._cum[s, a, b], self._rng.random(), side="right"))
        nxt = min(nxt, self.num_states - 1)
        return nxt, float(self._game.reward[s, a, b])


def sampling_env(game: ImpulseGame, seed=0, reset_states=None) -> SamplingEnv:
    """Wrap a game behind the sampling-only environment contract."""
    return SamplingEnv(game, seed=seed, reset_states=reset_states)
