"""Compare discrete gaps of the D-scaled lattice law with the continuous gap union."""

import argparse

from didgaps.levy_interval import (
    cells_within,
    discrete_gap_cells,
    interval_gaps,
    symmetric_difference_measure,
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--c", type=float, default=1.0)
    ap.add_argument("--delta", type=float, default=0.3)
    ap.add_argument("--D", type=int, nargs="+", default=[10, 20, 40, 80, 160])
    args = ap.parse_args()
    rep = interval_gaps(args.c, args.delta)
    union = rep.union()
    print(f"continuous gaps {[(round(a, 12), round(b, 12)) for a, b in union]}  tail {rep.tail_start}")
    print("D,cells,contained,symmetric_difference")
    for D in args.D:
        cells = discrete_gap_cells(args.c, args.delta, D)
        print(f"{D},{len(cells)},{cells_within(cells, union)},{symmetric_difference_measure(cells, union):.12g}")


if __name__ == "__main__":
    main()
