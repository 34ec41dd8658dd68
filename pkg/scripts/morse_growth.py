"""Morse index of the singular solution on annuli [1, R] in two dimensions.

The linearised potential about |x| (tau = -1) is -1/r^2, so the radial mode
sees the Euler operator and gains one negative direction each time log R grows
by pi. Prints log R, the computed index and floor(log R / pi).
"""

import argparse
import math

import numpy as np

from selab.core import ProblemSpec, singular_solution
from selab.spectral import morse_index


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--tau", type=float, default=-1.0)
    p.add_argument("--log-max", type=float, default=20.0)
    p.add_argument("--samples", type=int, default=25)
    p.add_argument("--N", type=int, default=2000)
    args = p.parse_args(argv)

    spec = ProblemSpec(2, args.tau)
    u = singular_solution(2, args.tau)
    print(f"{'log R':>8} {'index':>6} {'floor(logR/pi)':>15}")
    for L in np.linspace(0.5, args.log_max, args.samples):
        rep = morse_index(u, spec, math.exp(L), r0=1.0, N=args.N)
        print(f"{L:8.3f} {rep.morse_index:6d} {int(L // math.pi):15d}")


if __name__ == "__main__":
    main()
