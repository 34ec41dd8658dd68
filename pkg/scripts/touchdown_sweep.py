"""Lower the constant boundary value b on the unit ball until the grid solution touches down.

Prints the continuation table as CSV and compares the last converged b with the
radial boundary value problem on the same schedule.
"""

import argparse
import sys

from selab.core import Ball, ProblemSpec, make_grid
from selab.elliptic import continuation_csv, touchdown_continuation
from selab.errors import NoSolutionInBracket
from selab.radial import solve_radial_bvp


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--tau", type=float, default=-1.0)
    p.add_argument("--points", type=int, default=41)
    p.add_argument("--b-hi", type=float, default=2.0)
    p.add_argument("--b-lo", type=float, default=0.5)
    p.add_argument("--steps", type=int, default=40)
    args = p.parse_args(argv)

    spec = ProblemSpec(args.n, args.tau, domain=Ball(1.0), boundary=args.b_hi)
    grid = make_grid(Ball(1.0), args.n, args.points, boundary=args.b_hi)
    rows, b_star = touchdown_continuation(spec, grid, args.b_hi, args.b_lo, args.steps)
    sys.stdout.write(continuation_csv(rows))

    radial_last = None
    for b, _, _ in rows:
        try:
            solve_radial_bvp(ProblemSpec(args.n, args.tau), 1.0, b)
        except NoSolutionInBracket:
            break
        radial_last = b
    print(f"# grid b* = {b_star}", file=sys.stderr)
    print(f"# radial last solvable b = {radial_last}", file=sys.stderr)


if __name__ == "__main__":
    main()
