import numpy as np
import pytest

import impulsegames as ig

from _oracles import best_single_shot_value


def test_augment_state_count():
    base = ig.random_game(3, 1, 1, seed=0)
    aug = ig.augment(base, 2, 1)
    assert aug.game.num_states == 3 * 3 * 2
    assert len(aug.labels) == 18
    assert aug.labels[aug.index(2, 1, 0)] == (2, 1, 0)


def test_augment_zero_budgets_is_uncontrolled(g1):
    aug = ig.augment(g1, 0, 0)
    assert not aug.game.mask1[:, 1:].any()
    assert not aug.game.mask2[:, 1:].any()
    rep = ig.solve(aug.game, tol=1e-12)
    assert rep.value[0] == pytest.approx(2.0, abs=1e-9)  # 1 / (1 - 0.5)


def test_augmented_game_validates(g1):
    aug = ig.augment(g1, 2, 3)
    assert ig.validate(aug.game) == []


def test_budgeted_g2_hand_values(g2):
    rep, aug = ig.solve_budgeted(g2, 2, 0, tol=1e-10)
    grid = aug.value_grid(rep.value)
    assert grid[0, 0, 0] == pytest.approx(2.0, abs=1e-9)
    assert grid[0, 1, 0] == pytest.approx(2.5, abs=1e-9)
    assert grid[0, 2, 0] == pytest.approx(2.75, abs=1e-9)
    # acts while budget remains, idles at zero
    assert rep.policy.p1_acts[aug.index(0, 2, 0)]
    assert rep.policy.p1_acts[aug.index(0, 1, 0)]
    assert not rep.policy.p1_acts[aug.index(0, 0, 0)]


def test_budget_monotonicity_random_games():
    for k in range(4):
        base = ig.random_game(3, 1, 1, seed=800 + k)
        rep, aug = ig.solve_budgeted(base, 2, 2, tol=1e-9)
        grid = aug.value_grid(rep.value)
        assert (np.diff(grid, axis=1) >= -1e-8).all()  # more own budget helps P1
        assert (np.diff(grid, axis=2) <= 1e-8).all()   # more opponent budget hurts P1


def test_large_budget_matches_unconstrained(g1, g2, g3):
    for game in (g1, g2, g3):
        free = ig.solve(game, tol=1e-10).value
        rep, aug = ig.solve_budgeted(game, 40, 40, tol=1e-10)
        grid = aug.value_grid(rep.value)
        assert abs(grid[0, 40, 40] - free[0]) <= 1e-6


def test_one_shot_budget_matches_enumeration_oracle():
    for k in range(3):
        base = ig.random_game(3, 1, 0, seed=900 + k)
        rep, aug = ig.solve_budgeted(base, 1, 0, tol=1e-11)
        grid = aug.value_grid(rep.value)
        oracle = best_single_shot_value(base)
        assert np.abs(grid[:, 1, 0] - oracle).max() <= 1e-8


def test_simulate_budgeted_spends_frontloaded_budget(g2):
    rep, aug = ig.solve_budgeted(g2, 2, 0, tol=1e-10)
    run = ig.simulate_budgeted(aug, rep.policy, 100, seed=0)
    assert run.p1_interventions == 2
    assert np.flatnonzero(run.trajectory.actions1).tolist() == [0, 1]


def test_simulate_budgeted_zero_budgets_never_acts():
    base = ig.random_game(3, 2, 2, seed=5)
    rep, aug = ig.solve_budgeted(base, 0, 0, tol=1e-9)
    run = ig.simulate_budgeted(aug, rep.policy, 200, seed=3)
    assert run.p1_interventions == 0 and run.p2_interventions == 0


def test_simulate_budgeted_deterministic():
    base = ig.random_game(3, 1, 1, seed=6)
    rep, aug = ig.solve_budgeted(base, 1, 1, tol=1e-9)
    r1 = ig.simulate_budgeted(aug, rep.policy, 50, seed=9)
    r2 = ig.simulate_budgeted(aug, rep.policy, 50, seed=9)
    assert np.array_equal(r1.trajectory.states, r2.trajectory.states)


def test_feasibility_over_many_trajectories():
    rng = np.random.default_rng(0)
    for k in range(3):
        base = ig.random_game(2, 1, 1, seed=1000 + k)
        n1, n2 = int(rng.integers(0, 3)), int(rng.integers(0, 3))
        rep, aug = ig.solve_budgeted(base, n1, n2, tol=1e-8)
        for seed in range(50):
            run = ig.simulate_budgeted(aug, rep.policy, 40, seed=seed)
            assert run.p1_interventions <= n1
            assert run.p2_interventions <= n2


def test_masked_action_is_hard_fault(g2):
    rep, aug = ig.solve_budgeted(g2, 1, 0, tol=1e-9)
    bad = ig.EquilibriumPolicy(
        p1_acts=np.ones(aug.game.num_states, dtype=bool),
        p1_action=np.ones(aug.game.num_states, dtype=int),
        p2_acts=np.zeros(aug.game.num_states, dtype=bool),
        p2_action=np.zeros(aug.game.num_states, dtype=int),
    )
    with pytest.raises(RuntimeError, match="masked"):
        ig.simulate_budgeted(aug, bad, 10, seed=0)


def test_budgeted_qlearning_converges_small():
    base = ig.random_game(2, 1, 1, seed=14, gamma=0.8)
    rep, aug = ig.solve_budgeted(base, 2, 1, tol=1e-10)
    assert aug.game.num_states <= 20
    tol = 0.05 * (1 + np.abs(rep.q).max())
    for seed in range(3):
        q, diag = ig.learn(aug.game,
                           ig.LearnConfig(steps=200_000, seed=seed, episode_len=20),
                           reference_q=rep.q)
        seen = diag.visits > 0
        assert np.abs(q[seen] - rep.q[seen]).max() <= tol
