"""Fit the stability-bound constant C1 on training seeds, check held-out seeds.

    python scripts/calibrate_c1.py [--alpha 0.1] [--target-delta 0.05] [--out c1.json]
"""

import argparse
import json
import logging

from gsbd.experiments import ExperimentConfig, run_bound_calibration

log = logging.getLogger("calibrate_c1")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--alpha", type=float, default=0.1)
    ap.add_argument("--target-delta", type=float, default=0.05)
    ap.add_argument("--train", type=int, default=20)
    ap.add_argument("--test", type=int, default=40)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default=None, help="optional JSON with per-instance records")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    cfg = ExperimentConfig(master_seed=args.seed)
    res = run_bound_calibration(cfg, args.alpha, args.target_delta, args.train, args.test)
    log.info("C1 = %.6g from %d training instances", res["C1"], res["n_train"])
    log.info("bound held on %d of %d held-out instances with positive denominator (%.1f%%)",
             res["held"], res["feasible"], 100 * res["fraction"])
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(res, fh, indent=2, default=float)
            fh.write("\n")


if __name__ == "__main__":
    main()
