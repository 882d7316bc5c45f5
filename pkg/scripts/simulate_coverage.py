"""Coverage of small semigroup members as the sample count grows."""

import argparse

from didgaps.semigroup import semigroup
from didgaps.series import CompoundPoissonSpec
from didgaps.simulator import SimulationConfig, empirical_support_check, miss_probability, sample


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--gens", type=int, nargs="+", default=[3, 7])
    ap.add_argument("--rate", type=float, default=3.0)
    ap.add_argument("--horizon", type=int, default=17)
    ap.add_argument("--seed", type=int, default=20240601)
    args = ap.parse_args()
    law = CompoundPoissonSpec.uniform(args.gens, args.rate)
    sg = semigroup(args.gens)
    print("samples,containment,coverage,miss_probability_bound")
    for m in (100, 1_000, 10_000, 100_000):
        rep = empirical_support_check(sample(SimulationConfig(law, (1.0,), m, args.seed)), sg, horizon=args.horizon)
        print(f"{m},{rep.containment},{rep.coverage[1.0]:.6f},{miss_probability(law, 1.0, m, args.horizon):.3e}")


if __name__ == "__main__":
    main()
