#!/usr/bin/env python3
"""Sample lambda_A/Lambda_A ratios and report the observed upper bound
on rho_N, with JSON/CSV/SVG artifacts."""

import argparse

from outerstretch.experiments import ExperimentConfig, run_experiment


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rank", type=int, default=2)
    parser.add_argument("--samples", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--word-count", type=int, default=4)
    parser.add_argument("--out", default="results")
    args = parser.parse_args()
    report = run_experiment(
        ExperimentConfig(
            kind="rho_scan",
            rank=args.rank,
            samples=args.samples,
            seed=args.seed,
            word_count=args.word_count,
            output_dir=args.out,
        )
    )
    print(
        f"rho_{args.rank} <= {report['rho_upper_bound']} "
        f"(family bound 2/(N+1) = {report['family_bound_2_over_N_plus_1']}, "
        f"holds: {report['family_bound_holds']})"
    )


if __name__ == "__main__":
    main()
