"""Run the four benchmark protocols and write one CSV per configuration.

Experiment 2 is repeated for every non-identity marginal transform so the
robustness comparison covers the full set. Expect the default settings to
take a few minutes; cut --trials down for a smoke run.
"""

import argparse
import sys
import time
from pathlib import Path

from npn.cli import main as npn_main

TRANSFORMS = ["exp", "cubic", "tanh", "sigmoid", "normcdf"]


def run(argv, out_path):
    start = time.perf_counter()
    rc = npn_main(argv + ["--out", str(out_path)])
    elapsed = time.perf_counter() - start
    status = "ok" if rc == 0 else f"exit {rc}"
    print(f"  {out_path.name:24s} {status} ({elapsed:.1f}s)")
    return 0 if rc == 0 else 1


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", type=Path, default=Path("results"))
    parser.add_argument("--trials", type=int, default=200)
    parser.add_argument("--trials-e4", type=int, default=500)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--experiments",
        default="1,2,3,4",
        help="comma list of experiment ids to run",
    )
    args = parser.parse_args()

    wanted = {s.strip() for s in args.experiments.split(",") if s.strip()}
    args.out_dir.mkdir(parents=True, exist_ok=True)
    failures = 0

    common = ["--seed", str(args.seed), "--format", "csv"]

    if "1" in wanted:
        print("experiment 1: sample-size sweep, D = 8")
        failures += run(
            ["simulate", "--experiment", "1", "--d", "8",
             "--trials", str(args.trials)] + common,
            args.out_dir / "e1_sample_size.csv",
        )

    if "2" in wanted:
        print("experiment 2: marginal transforms, D = 25, n = 100")
        for name in TRANSFORMS:
            failures += run(
                ["simulate", "--experiment", "2", "--transform", name,
                 "--estimators", "gaussian,gauss,rho,tau",
                 "--trials", str(args.trials)] + common,
                args.out_dir / f"e2_marginals_{name}.csv",
            )

    if "3" in wanted:
        print("experiment 3: outlier contamination, D = 25, n = 100")
        failures += run(
            ["simulate", "--experiment", "3",
             "--estimators", "gaussian,tau,knn",
             "--trials", str(args.trials)] + common,
            args.out_dir / "e3_outliers.csv",
        )

    if "4" in wanted:
        print("experiment 4: strong dependence, D = 2")
        failures += run(
            ["simulate", "--experiment", "4",
             "--estimators", "gaussian,rho,knn",
             "--trials", str(args.trials_e4)] + common,
            args.out_dir / "e4_sigma.csv",
        )

    if failures:
        print(f"{failures} run(s) failed")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
