"""Print value tables and gap reports for the two-generator cases {1,3}, {2,3}, {3,7}, {4,9}."""

import argparse

from didgaps.semigroup import gap_report, gap_runs, jump_count_values, semigroup

CASES = [(1, 3), (2, 3), (3, 7), (4, 9)]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rows", type=int, default=6, help="rows n = 0..rows-1")
    args = ap.parse_args()
    for gens in CASES:
        sg = semigroup(gens)
        print(f"gens {gens}")
        for n in range(args.rows):
            print(f"  n={n}: {jump_count_values(gens, n)}")
        rep = gap_report(sg)
        print(f"  gaps {list(rep.gaps)}  frobenius {rep.frobenius}  conductor {rep.conductor}")
        print(f"  gap runs (start, length) {gap_runs(sg)}\n")


if __name__ == "__main__":
    main()
