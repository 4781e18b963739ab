"""CCDF slope of generated in-degrees versus network size and planted exponent."""

import argparse

from tcmesh.network import build_network
from tcmesh.stats import ccdf_points, fit_ccdf_slope
from tcmesh.synth import SynthConfig, generate


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--exponents", default="2.1,2.3,2.6")
    ap.add_argument("--sizes", default="1000,3000,10000")
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--kmax", type=int, default=150)
    args = ap.parse_args()

    print(f"{'exponent':>8} {'n':>6} {'target':>7} {'slope':>7} {'r2':>6}")
    for a in (float(x) for x in args.exponents.split(",")):
        for n in (int(x) for x in args.sizes.split(",")):
            ds, _ = generate(SynthConfig(n_suppliers=n, degree_exponent=a, seed=args.seed))
            k_in = [len(v) for v in build_network(ds).in_edges.values()]
            fit = fit_ccdf_slope(ccdf_points(k_in), 1, args.kmax)
            print(f"{a:8.2f} {n:6d} {1 - a:7.2f} {fit.slope:7.3f} {fit.r_squared:6.3f}")


if __name__ == "__main__":
    main()
