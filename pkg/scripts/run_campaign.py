"""Run every scenario config under configs/ and summarize pass/fail.

    python3 scripts/run_campaign.py [--configs configs] [--out results] [--threads 4]
"""
from __future__ import annotations

import argparse
import csv
import time
from pathlib import Path

from conelab.cli import run, write_outputs
from conelab.config import load_config


def main() -> int:
    root = Path(__file__).resolve().parent.parent
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--configs", type=Path, default=root / "configs")
    ap.add_argument("--out", type=Path, default=root / "results")
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    summary = []
    surprises = 0
    t_all = time.perf_counter()
    for path in sorted(args.configs.glob("*.json")):
        cfg = load_config(path)
        report = run(cfg, args.threads)
        write_outputs(report, args.out / f"{path.stem}.csv")
        failed = [c.name for c in report.checks if not c.ok]
        # configs may declare "expect": "fail" (precondition-violation demos)
        expected = cfg.raw.get("expect", "pass") == "pass"
        surprises += report.passed != expected
        summary.append([path.stem, cfg.scenario, len(report.checks), len(failed),
                        f"{report.timing['seconds']:.2f}", ";".join(sorted(set(failed)))])
        print(f"{'PASS' if report.passed else 'FAIL'} {path.stem:24s} "
              f"{len(report.checks):4d} checks  {report.timing['seconds']:6.2f}s"
              + ("" if report.passed == expected else "  (unexpected)"))
    with open(args.out / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["config", "scenario", "checks", "failed", "seconds", "failed_checks"])
        w.writerows(summary)
    print(f"total {time.perf_counter() - t_all:.1f}s -> {args.out}")
    return 1 if surprises else 0


if __name__ == "__main__":
    raise SystemExit(main())
