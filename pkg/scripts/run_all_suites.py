"""Run the verification suites with one seed and print a table of results.

    python3 scripts/run_all_suites.py --seed 20261017 [--config run.json] [--json reports.json]

A config file holds a RunConfig, e.g.
    {"seed": 7, "suites": ["oracle", "chain"], "trials": {"oracle": 1000}}
"""

import argparse
import json
import time

from measureiso.suites import RunConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=None, help="overrides the config seed")
    ap.add_argument("--config", default=None, help="JSON file with a RunConfig")
    ap.add_argument("--json", default=None, help="also write all reports here")
    args = ap.parse_args()

    doc = {}
    if args.config:
        with open(args.config) as fh:
            doc = json.load(fh)
    if args.seed is not None:
        doc["seed"] = args.seed
    cfg = RunConfig.from_json(doc)

    reports, failed = [], 0
    t0 = time.perf_counter()
    for name, rep in cfg.run():
        dt, t0 = time.perf_counter() - t0, time.perf_counter()
        failed += not rep.passed
        reports.append(rep.to_json())
        print(f"{name:16s} {'pass' if rep.passed else 'FAIL':4s}  trials={rep.trials:4d}  "
              f"max_error={rep.max_error:.3e}  {dt:6.1f}s")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(reports, fh, indent=2, sort_keys=True, default=str)
    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
