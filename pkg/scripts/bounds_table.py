"""Supremum bounds (1-gamma_n) C_extra,n and gamma_n C~_intra,n next to the measured suprema."""
import argparse
import math

from prolate_fd.bounds import bound_report
from prolate_fd.pswf import BandTimeSpec, build_basis


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--c", type=float, default=10.0)
    ap.add_argument("--T", type=float, default=1.0)
    args = ap.parse_args()
    spec = BandTimeSpec.from_any(c=args.c, T=args.T)
    n_max = int(math.ceil(spec.c_tilde)) + 2
    b = build_basis(spec, n_max + 1)
    print("%3s %11s %11s %11s %11s %11s" % ("n", "1-gamma", "sup out", "bound out", "sup in", "bound in"))
    for n in range(n_max + 1):
        r = bound_report(b, n)
        print("%3d %11.3e %11.3e %11.3e %11.3e %11.3e" % (
            n, r.one_minus_gamma, r.sup_out_numeric, r.sup_out_bound,
            r.sup_in_numeric, r.sup_in_bound))


if __name__ == "__main__":
    main()
