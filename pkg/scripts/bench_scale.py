#!/usr/bin/env python3
"""Timing check at road-rule scale: 40 variables, 250 clauses, 1000 rows.

Generates a satisfiable clause set around a planted assignment, compiles it,
and times the correction of a uniform-random batch.  Prints compile time,
correction time, and violation statistics.
"""

import argparse
import random
import time

from shield import build_shield_layer_from_text, count_violations
from shield.batch import PredictionBatch


def planted_cnf_text(rng: random.Random, n: int, m: int, widths=(2, 3, 4)) -> str:
    planted = [rng.random() < 0.5 for _ in range(n)]
    lines = []
    for _ in range(m):
        w = min(rng.choice(widths), n)
        variables = rng.sample(range(n), w)
        literals = [(v, rng.random() < 0.5) for v in variables]
        if not any(planted[v] != neg for v, neg in literals):
            j = rng.randrange(w)
            v = literals[j][0]
            literals[j] = (v, not planted[v])  # literal agrees with the planted model
        lines.append(
            " or ".join(("not " if neg else "") + f"y_{v}" for v, neg in literals)
        )
    return "\n".join(lines) + "\n"


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--variables", type=int, default=40)
    parser.add_argument("--clauses", type=int, default=250)
    parser.add_argument("--rows", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    text = planted_cnf_text(rng, args.variables, args.clauses)

    t0 = time.perf_counter()
    layer = build_shield_layer_from_text(text, args.variables)
    t1 = time.perf_counter()
    print(f"compiled {args.clauses} clauses over {args.variables} variables "
          f"in {t1 - t0:.3f}s (engine: {layer.engine})")

    batch = [[rng.random() for _ in range(args.variables)] for _ in range(args.rows)]
    t2 = time.perf_counter()
    corrected = [layer.correct_row(row) for row in batch]
    t3 = time.perf_counter()

    before = sum(count_violations(layer.requirements, PredictionBatch(batch)))
    after = sum(count_violations(layer.requirements, PredictionBatch(corrected)))
    flips = sum(
        1 for row, out in zip(batch, corrected) for a, b in zip(row, out) if a != b
    )
    print(f"corrected {args.rows} rows in {t3 - t2:.3f}s "
          f"({(t3 - t2) / args.rows * 1e3:.2f} ms/row)")
    print(f"violations: {before} before, {after} after; {flips} coordinates flipped")
    assert after == 0, "correction left violations behind"


if __name__ == "__main__":
    main()
