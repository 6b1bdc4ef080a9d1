"""Out-of-band envelope bound eps~_M against its grid supremum and the large-c estimate."""
import argparse
import math
import warnings

from prolate_fd.filter_diag import FilterSystem, envelope_grid_sup, prolate_envelope_sup
from prolate_fd.pswf import BandTimeSpec, build_basis


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--c", type=float, default=10.0)
    ap.add_argument("--max-M", type=int, default=6)
    args = ap.parse_args()
    r = math.sqrt(args.c)
    b = build_basis(BandTimeSpec(T=r, W=r), args.max_M + 2)
    print("%3s %12s %12s %12s %12s" % ("M", "grid sup", "eps~_M", "coarse", "asymptotic"))
    for M in range(1, args.max_M + 1):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            env = prolate_envelope_sup(b, M)
        grid = envelope_grid_sup(FilterSystem(b, M))
        print("%3d %12.4e %12.4e %12.4e %12.4e" % (M, grid, env.eps_tilde, env.coarse, env.asymptotic))


if __name__ == "__main__":
    main()
