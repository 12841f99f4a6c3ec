"""Independent reference implementations used only to cross-check the library.

Everything here is written with plain per-state loops, deliberately sharing
no code with the vectorised solver.
"""

import itertools

import numpy as np


def single_agent_impulse_vi(game, tol=1e-13, max_sweeps=1_000_000):
    """Value iteration for the one-player costly-action problem.

    Ignores Player 2 entirely: per state, the better of the best costly
    action (cost subtracted) and doing nothing.
    """
    ns = game.num_states
    v = [0.0] * ns
    for _ in range(max_sweeps):
        nv = []
        for s in range(ns):
            wait = game.reward[s, 0, 0]
            for t in range(ns):
                wait += game.discount * game.kernel[s, 0, 0, t] * v[t]
            best = wait
            for a in range(1, game.num_actions1):
                if not game.mask1[s, a]:
                    continue
                val = game.reward[s, a, 0] - game.cost1[s, a]
                for t in range(ns):
                    val += game.discount * game.kernel[s, a, 0, t] * v[t]
                if val > best:
                    best = val
            nv.append(best)
        delta = max(abs(a - b) for a, b in zip(nv, v))
        v = nv
        if delta <= tol:
            break
    return np.array(v)


def mrp_value(p, r, gamma):
    """Exact value of an uncontrolled discounted chain."""
    n = len(r)
    return np.linalg.solve(np.eye(n) - gamma * np.asarray(p), np.asarray(r))


def best_single_shot_value(game, n_budget=1):
    """Brute-force optimum of a one-player game whose action budget is 1.

    Enumerates every stationary rule "at y=1 play action pol(s)" and
    evaluates it exactly on the (state, budget-left) chain built right here.
    """
    assert game.num_actions2 == 1
    ns, na = game.num_states, game.num_actions1
    gamma = game.discount
    best = np.full(ns, -np.inf)
    for pol in itertools.product(range(na), repeat=ns):
        # chain over (s, y): index s for y=1, ns + s for y=0
        p = np.zeros((2 * ns, 2 * ns))
        r = np.zeros(2 * ns)
        for s in range(ns):
            a = pol[s]
            if a == 0:
                p[s, :ns] = game.kernel[s, 0, 0]
                r[s] = game.reward[s, 0, 0]
            else:
                p[s, ns:] = game.kernel[s, a, 0]
                r[s] = game.reward[s, a, 0] - game.cost1[s, a]
            p[ns + s, ns:] = game.kernel[s, 0, 0]
            r[ns + s] = game.reward[s, 0, 0]
        v = np.linalg.solve(np.eye(2 * ns) - gamma * p, r)
        best = np.maximum(best, v[:ns])
    return best
