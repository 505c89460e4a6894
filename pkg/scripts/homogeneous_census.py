#!/usr/bin/env python3
"""Census of homogeneous linear spaces up to a point bound.

Enumerates every isomorphism class, tests homogeneity, and prints the
verdicts; the two smallest algebraic planes are tested directly on top.
"""

import argparse
import time

from lingeo import classify_homogeneous, is_homogeneous, projective_plane
from lingeo.enumeration import homogeneity_tag


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-points", type=int, default=7)
    args = parser.parse_args()

    t0 = time.time()
    records = classify_homogeneous(args.max_points)
    by_tag: dict[str, int] = {}
    failures = 0
    for record in records:
        if record.homogeneous:
            by_tag[record.tag] = by_tag.get(record.tag, 0) + 1
        else:
            failures += 1
    print(f"classes tested: {len(records)}  (<= {args.max_points} points)")
    print(f"homogeneous: {len(records) - failures}  by tag: {by_tag}")
    print(f"non-homogeneous: {failures}")

    for q in (2, 3):
        plane = projective_plane(q)
        verdict = is_homogeneous(plane)
        print(
            f"pg(2,{q}): homogeneous={verdict.homogeneous} "
            f"tag={homogeneity_tag(plane)}"
        )
    print(f"elapsed: {time.time() - t0:.1f}s")


if __name__ == "__main__":
    main()
