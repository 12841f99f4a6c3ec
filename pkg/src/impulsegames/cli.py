"""Command-line front door: solve, learn, simulate, oracle, budget, gen.

Exit codes: 0 success, 1 input error (bad file, bad flags), 2 the run
finished but did not reach its goal (no convergence / uncertified).  All
randomness in a run flows from one seeded generator, and every output file
is byte-reproducible given the same flags.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys

from . import budget as budget_mod
from . import linfa
from . import qlearn
from .envs import build_duopoly_game, duopoly_params_from_dict
from .game import (GameFormatError, GameValidationError, load_basis, load_game,
                   random_game, save_game)
from .sim import simulate
from .solver import (EnumerationBudgetError, intervention_times, minimax_oracle,
                     solve)

log = logging.getLogger("impulsegames")


def _write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(obj, f, sort_keys=True, indent=2, allow_nan=False)
        f.write("\n")


def _write_csv(path, fieldnames, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=fieldnames)
        writer.writeheader()
        writer.writerows(rows)


def _parse_gen(spec: str):
    parts = spec.split(",")
    if len(parts) != 4:
        raise ValueError("--gen expects \"S,A,B,seed\"")
    return tuple(int(p.strip()) for p in parts)


def _obtain_game(args):
    if args.game is not None:
        return load_game(args.game)
    if getattr(args, "duopoly", None) is not None:
        with open(args.duopoly, encoding="utf-8") as f:
            doc = json.load(f)
        return build_duopoly_game(duopoly_params_from_dict(doc))
    s, a, b, seed = _parse_gen(args.gen)
    return random_game(s, a, b, seed, gamma=args.gamma)


def _outdir(args) -> str:
    os.makedirs(args.out, exist_ok=True)
    return args.out


def cmd_solve(args) -> int:
    game = _obtain_game(args)
    report = solve(game, tol=args.tol, max_sweeps=args.max_sweeps)
    out = _outdir(args)
    _write_json(os.path.join(out, "solve_report.json"), report.to_dict())
    rows = report.policy.to_records()
    for row, v in zip(rows, report.value):
        row["value"] = float(v)
    _write_csv(os.path.join(out, "policy.csv"),
               ["state", "p1_acts", "p1_action", "p2_acts", "p2_action",
                "executed_a", "executed_b", "value"], rows)
    if not report.converged:
        log.warning("stopped after %d sweeps with residual %.3g", report.sweeps,
                    report.residual)
        return 2
    return 0


def cmd_learn(args) -> int:
    game = _obtain_game(args)
    reference = solve(game, tol=1e-9).q if game.num_states <= 200 else None
    config = qlearn.LearnConfig(steps=args.steps, epsilon_start=args.epsilon,
                                omega=args.omega, seed=args.seed)
    q, diag = qlearn.learn(game, config, reference_q=reference)
    out = _outdir(args)
    _write_json(os.path.join(out, "q.json"), {
        "q": q.tolist(),
        "steps": diag.steps_run,
        "final_sup_delta": diag.final_sup_delta,
    })
    diag.to_csv(os.path.join(out, "learn_diagnostics.csv"))
    return 0


def cmd_simulate(args) -> int:
    game = _obtain_game(args)
    report = solve(game, tol=args.tol, max_sweeps=args.max_sweeps)
    if not report.converged:
        log.error("solver did not converge; not simulating")
        return 2
    traj = simulate(game, report.policy, steps=args.steps, seed=args.seed,
                    start=args.start)
    taus, rhos = intervention_times(game, report.policy, traj.states[:-1])
    out = _outdir(args)
    rows = [{
        "t": t,
        "s": int(traj.states[t]),
        "executed_a": int(traj.actions1[t]),
        "executed_b": int(traj.actions2[t]),
        "reward": float(traj.rewards[t]),
        "cumulative_return": float(traj.cumulative[t]),
    } for t in range(args.steps)]
    _write_csv(os.path.join(out, "trajectory.csv"),
               ["t", "s", "executed_a", "executed_b", "reward", "cumulative_return"],
               rows)
    _write_json(os.path.join(out, "interventions.json"), {"taus": taus, "rhos": rhos})
    return 0


def cmd_oracle(args) -> int:
    game = _obtain_game(args)
    report = minimax_oracle(game, max_enumeration=args.max_enumeration)
    out = _outdir(args)
    _write_json(os.path.join(out, "oracle.json"), report.to_dict())
    return 0 if report.certified else 2


def cmd_budget(args) -> int:
    game = _obtain_game(args)
    report, aug = budget_mod.solve_budgeted(game, args.n1, args.n2, tol=args.tol,
                                            max_sweeps=args.max_sweeps)
    out = _outdir(args)
    labels = [f"({s},{y},{z})" for s, y, z in aug.labels]
    _write_json(os.path.join(out, "budget_report.json"), report.to_dict(labels))
    run = budget_mod.simulate_budgeted(aug, report.policy, steps=args.steps,
                                       seed=args.seed, start=args.start)
    traj = run.trajectory
    rows = [{
        "t": t,
        "state": labels[traj.states[t]],
        "executed_a": int(traj.actions1[t]),
        "executed_b": int(traj.actions2[t]),
        "reward": float(traj.rewards[t]),
        "cumulative_return": float(traj.cumulative[t]),
    } for t in range(len(traj.rewards))]
    _write_csv(os.path.join(out, "budget_trajectory.csv"),
               ["t", "state", "executed_a", "executed_b", "reward",
                "cumulative_return"], rows)
    if not report.converged:
        return 2
    return 0


def cmd_fit(args) -> int:
    """Sampled weight fit, polished to the projected fixed point for the
    bound check (the bound is a statement about the limit coefficients)."""
    game = _obtain_game(args)
    basis_matrix = load_basis(args.game) if args.game else None
    basis = (linfa.FeatureBasis(basis_matrix) if basis_matrix is not None
             else linfa.identity_basis(game.num_states))
    config = linfa.FitConfig(samples=args.steps, seed=args.seed,
                             combinator=args.combinator)
    r, report = linfa.fit(game, basis, config)
    bound = linfa.verify_bound(game, basis, r)
    polished, _ = linfa.projected_iteration(game, basis, bound.weights,
                                            combinator=args.combinator)
    bound = linfa.verify_bound(game, basis, polished)
    out = _outdir(args)
    _write_json(os.path.join(out, "fit_report.json"), {
        "r": polished.tolist(),
        "lhs": bound.lhs,
        "rhs": bound.rhs,
        "holds": bound.holds,
        "samples": report.samples_run,
    })
    return 0 if bound.holds else 2


def cmd_gen(args) -> int:
    out = _outdir(args)
    if getattr(args, "duopoly", None) is not None:
        with open(args.duopoly, encoding="utf-8") as f:
            doc = json.load(f)
        game = build_duopoly_game(duopoly_params_from_dict(doc))
    elif args.gen is not None:
        s, a, b, seed = _parse_gen(args.gen)
        game = random_game(s, a, b, seed, gamma=args.gamma)
    else:
        log.error("gen requires --gen \"S,A,B,seed\" or --duopoly PARAMS.json")
        return 1
    save_game(game, os.path.join(out, "game.json"))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="impulsegames",
        description="Solve, learn and simulate two-player zero-sum games "
                    "with costly actions.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_game=True):
        src = p.add_mutually_exclusive_group(required=needs_game)
        src.add_argument("--game", help="path to a game-spec JSON file")
        src.add_argument("--gen", help="random game spec \"S,A,B,seed\"")
        src.add_argument("--duopoly", help="path to a duopoly parameter JSON block")
        p.add_argument("--gamma", type=float, default=0.9,
                       help="discount for --gen games (default 0.9)")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("solve", help="exact value, action table and policy")
    common(p)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-sweeps", type=int, default=100_000)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("learn", help="model-free learning of the action table")
    common(p)
    p.add_argument("--steps", type=int, default=100_000)
    p.add_argument("--epsilon", type=float, default=0.2)
    p.add_argument("--omega", type=float, default=0.85)
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("simulate", help="roll out the solved policy")
    common(p)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-sweeps", type=int, default=100_000)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--start", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("oracle", help="certify the value by policy enumeration")
    common(p)
    p.add_argument("--max-enumeration", type=int, default=1_000_000)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("fit", help="linear value approximation and bound check")
    common(p)
    p.add_argument("--steps", type=int, default=100_000,
                   help="number of sampled iteration steps")
    p.add_argument("--combinator", choices=["F", "T"], default="T",
                   help="operator nesting used for the fit target")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("budget", help="solve and simulate with intervention caps")
    common(p)
    p.add_argument("--n1", type=int, required=True, help="Player 1 intervention cap")
    p.add_argument("--n2", type=int, required=True, help="Player 2 intervention cap")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-sweeps", type=int, default=100_000)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--start", type=int, default=0)
    p.set_defaults(func=cmd_budget)

    p = sub.add_parser("gen", help="emit a random game-spec file")
    common(p, needs_game=False)
    p.set_defaults(func=cmd_gen)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("IMPULSEGAMES_LOG_LEVEL", "WARNING"))
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (GameFormatError, GameValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except EnumerationBudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
