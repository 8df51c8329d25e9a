"""Regenerate the benchmark datasets (trajectories, scans, grids, validation).

Writes CSVs into data/ using the CLI layer, so every file carries a
round-trippable config header. The plotting package consumes these files.

Usage: python scripts/reproduce_data.py [--out-dir data] [--quick]
"""

import argparse
from pathlib import Path

from tdlim.cli import main as tdlim_main

FIG2_X0 = "0.01,0.99,0.3,0.7,0.99,0.01,0.4,0.6"
FIG8_X0 = "0.51,0.49,0.49,0.51,0.49,0.51,0.51,0.49"


def run(args):
    code = tdlim_main(args)
    if code != 0:
        raise SystemExit(f"command failed with exit code {code}: {args}")
    print("wrote", args[args.index("--out") + 1])


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out-dir", default="data")
    parser.add_argument("--quick", action="store_true",
                        help="smaller transients and grids for a fast smoke run")
    opts = parser.parse_args()
    out = Path(opts.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    transient_mp = "2000" if opts.quick else "100000"
    transient_pd = "1000" if opts.quick else "5000"
    record = "200" if opts.quick else "1000"
    grid = "6" if opts.quick else "12"
    gamma_values = ",".join(f"{g / 20:.2f}" for g in range(1, 20))

    # reward/phase trajectories in the zero-sum game, all learners, both rates
    for learner in ("q", "sarsa", "ac"):
        for alpha, tag in (("0.02", "slow"), ("0.8", "fast")):
            run(["traj", "--game", "matching_pennies", "--learner", learner,
                 "--alpha", alpha, "--beta", "5", "--gamma", "0.1",
                 "--x0", FIG2_X0, "--steps", "2000", "--epsilon", "1e-6",
                 "--out", str(out / f"mp_traj_{learner}_{tag}.csv")])
        run(["traj", "--game", "matching_pennies", "--learner", learner,
             "--alpha", "0.02", "--beta", "5", "--gamma", "0.1",
             "--grid", grid, "--out", str(out / f"mp_grid_{learner}.csv")])

    # discount-factor sweeps with Lyapunov exponents
    for learner in ("q", "sarsa", "ac"):
        run(["scan", "--game", "matching_pennies", "--learner", learner,
             "--alpha", "0.8", "--beta", "5", "--gamma", "0.1",
             "--x0", FIG2_X0, "--axis", "gamma", "--values", gamma_values,
             "--record", record, "--transient", transient_mp, "--jobs", "4",
             "--out", str(out / f"mp_scan_gamma_{learner}.csv")])
        run(["scan", "--game", "prisoners_dilemma", "--learner", learner,
             "--alpha", "0.2", "--beta", "5", "--gamma", "0.1",
             "--x0", FIG8_X0, "--axis", "gamma", "--values", gamma_values,
             "--record", record, "--transient", transient_pd, "--jobs", "4",
             "--out", str(out / f"pd_scan_gamma_{learner}.csv")])

    # batch-size validation of the infinite-interaction limit
    run(["validate", "--game", "prisoners_dilemma", "--learner", "sarsa",
         "--alpha", "0.1", "--beta", "5", "--gamma", "0.45",
         "--values", "100,1000,10000,100000,1000000", "--seed", "1000",
         "--out", str(out / "pd_validate_sarsa.csv")])


if __name__ == "__main__":
    main()
