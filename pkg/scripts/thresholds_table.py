"""Stability, Liouville and HLS thresholds over a range of dimensions for several tau."""

import argparse

from selab.cli import format_thresholds, thresholds_table


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--taus", default="-0.5,-1,-2,-5", help="comma separated, all negative (write --taus=-1,-2)")
    p.add_argument("--n-max", type=int, default=12)
    p.add_argument("--mu", type=float, default=1.0)
    args = p.parse_args(argv)

    for tau in (float(t) for t in args.taus.split(",")):
        print(format_thresholds(thresholds_table(tau, range(2, args.n_max + 1), args.mu)))


if __name__ == "__main__":
    main()
