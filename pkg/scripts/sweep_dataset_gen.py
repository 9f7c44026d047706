#!/usr/bin/env python3
"""Sweep the dataset-generation iteration budget against a scripted mock.

Reproduces the iteration/cost tradeoff shape: cumulative pass rate climbs
with the budget until the solvable mass is exhausted, while cost per solved
instance keeps rising. Prints one row per max_iters setting.

    python3 scripts/sweep_dataset_gen.py [--max-sweep N] [--population N]
"""

import argparse
import pathlib
import random
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from chipeval.llm import (
    GenCase,
    LlmConfig,
    MockChatClient,
    run_dataset_generation,
    scripted_verifier,
)


def synth_population(n: int, seed: int) -> dict:
    """Population with geometric-ish first-success turns and a hard tail."""
    rng = random.Random(seed)
    schedule = {}
    for i in range(n):
        roll = rng.random()
        if roll < 0.35:
            turn = 1
        elif roll < 0.50:
            turn = 2
        elif roll < 0.58:
            turn = 3
        elif roll < 0.62:
            turn = rng.randint(4, 6)
        else:
            turn = None  # never solvable: the paper-style plateau
        schedule[f"case_{i:03d}"] = turn
    return schedule


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-sweep", type=int, default=8)
    parser.add_argument("--population", type=int, default=100)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()

    schedule = synth_population(args.population, args.seed)
    solvable = sum(1 for t in schedule.values() if t is not None)
    print(f"population {len(schedule)}, solvable {solvable} "
          f"({100 * solvable / len(schedule):.0f}%)\n")
    cases = [
        GenCase(cid, "mock prompt", "module m(); endmodule", "module m")
        for cid in sorted(schedule)
    ]
    print(f"{'max_iters':>9}  {'pass_rate':>9}  {'total_$':>8}  {'$_per_solved':>12}")
    for max_iters in range(1, args.max_sweep + 1):
        cfg = LlmConfig(max_iters=max_iters, price_in=2.0, price_out=10.0)
        client = MockChatClient(schedule)
        _, summary = run_dataset_generation(
            cases, client, cfg, lambda case: scripted_verifier, workers=8
        )
        per_solved = summary["cost_per_solved"]
        print(
            f"{max_iters:>9}  {summary['pass_rate']:>9.3f}  "
            f"{summary['total_cost']:>8.3f}  "
            f"{per_solved if per_solved is None else round(per_solved, 4):>12}"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
