#!/usr/bin/env python3
"""Amalgamation-property survey across the built-in classes.

The degree-bounded classes verify cleanly; the unrestricted class fails with
certificates as soon as non-closed bases appear.
"""

import argparse
import time

from lingeo import class_by_name, verify_class_ap


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-points", type=int, default=6)
    parser.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args()

    for name in ("d3", "d4star", "all"):
        cap = min(args.max_points, 5 if name == "all" else args.max_points)
        start = time.time()
        report = verify_class_ap(class_by_name(name), cap, jobs=args.jobs)
        print(
            f"{report.class_name:16s} <= {cap} points: "
            f"bases={report.bases_checked:3d} pairs={report.pairs_checked:4d} "
            f"failures={report.total_failures:2d} "
            f"inconclusive={len(report.inconclusive)} "
            f"[{time.time() - start:.1f}s]"
        )
        for failure in report.sanity_failures[:3]:
            print(
                f"    certified failure over {failure.base.n_points}-point base "
                f"{failure.base.lines}"
            )


if __name__ == "__main__":
    main()
