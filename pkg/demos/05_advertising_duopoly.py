#!/usr/bin/env python3
"""Two firms fight for market share with costly advertising bursts.

Sales decay on their own; an investment pulls untapped market share toward
the investor.  The game's scalar payoff is the revenue difference, so one
firm's gain is exactly the other's loss.  The solved policy shows each firm
investing only from weak positions, where the untapped pool makes a burst
worth its fee.
"""

import numpy as np

import impulsegames as ig

params = ig.DuopolyParams()  # 11x11 lattice, three investment sizes per firm
game = ig.build_duopoly_game(params)
print(f"lattice {params.grid_size}x{params.grid_size} -> {game.num_states} states, "
      f"{game.num_actions1 - 1} investment sizes per firm")
assert ig.validate(game) == []

report = ig.solve(game, tol=1e-8)
print(f"solved in {report.sweeps} sweeps, residual {report.residual:.2e}")

g = params.grid_size
p1 = report.policy.p1_acts.reshape(g, g)
p2 = report.policy.p2_acts.reshape(g, g)
print("\nintervention map (rows: firm 1 sales, cols: firm 2 sales)")
print("1 = firm 1 invests, 2 = firm 2 invests, * = both trigger "
      "(firm 2 executes), . = neither")
for i in range(g):
    row = ""
    for j in range(g):
        row += "*" if p1[i, j] and p2[i, j] else \
               "1" if p1[i, j] else "2" if p2[i, j] else "."
    print("    " + row)

s0 = game.num_states // 2
rolls = np.array([
    ig.simulate(game, report.policy, 250, seed=i, start=s0).discounted_return
    for i in range(400)
])
se = rolls.std(ddof=1) / np.sqrt(len(rolls))
print(f"\nMonte-Carlo return from the centre state: {rolls.mean():8.3f} "
      f"+- {se:.3f}")
print(f"solver value at the same state:           {report.value[s0]:8.3f}")

traj = ig.simulate(game, report.policy, 6, seed=0, start=s0)
print("\nzero-sum accounting on a few sampled steps:")
for t in range(6):
    pair = (int(traj.actions1[t]), int(traj.actions2[t]))
    s = int(traj.states[t])
    r1 = traj.rewards[t]
    r2 = ig.player2_reward(game, s, pair)
    print(f"    t={t}: pair {pair}, firm 1 nets {r1:8.3f}, firm 2 nets {r2:8.3f}")
