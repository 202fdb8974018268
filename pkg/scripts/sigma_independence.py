"""Compare coefficient norms and continuous coorbit norms of seeded polynomials at two sigma values."""
import argparse

import numpy as np

from ballframes import HoloFunction
from ballframes.bergman import multi_indices_upto
from ballframes.frames import FrameSystem, decompose
from ballframes.quadrature import rule_for_degree
from ballframes.representation import coorbit_norm
from ballframes.sampling import generate_lattice


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=1)
    ap.add_argument("--alpha", type=float, default=0.0)
    ap.add_argument("--eps", type=float, default=0.1)
    ap.add_argument("--box", type=float, default=1.5)
    ap.add_argument("--count", type=int, default=20)
    ap.add_argument("--degree", type=int, default=5)
    ap.add_argument("--seed", type=int, default=10)
    args = ap.parse_args()
    n = args.n
    fam = generate_lattice(args.eps, args.box, n)
    s1, s2 = (FrameSystem(fam, n + k, args.alpha, 2.0, max(args.degree, 1)) for k in (2.0, 3.0))
    rule = rule_for_degree(n, args.alpha, 2 * args.degree + 2)
    rng = np.random.default_rng(args.seed)
    gs = multi_indices_upto(n, args.degree)
    print("index,seq_norm_sigma1,seq_norm_sigma2,ratio,coorbit_ratio,residual_max")
    for i in range(args.count):
        f = HoloFunction(n, dict(zip(gs, rng.standard_normal(len(gs)) + 1j * rng.standard_normal(len(gs)))))
        c1, r1 = decompose(s1, f)
        c2, r2 = decompose(s2, f)
        a, b = c1.meta["seq_norm"], c2.meta["seq_norm"]
        cr = coorbit_norm(s1.params, f, 2, args.alpha, rule) / coorbit_norm(s2.params, f, 2, args.alpha, rule)
        print(f"{i},{a:.8g},{b:.8g},{a / b:.6f},{cr:.15f},{max(r1, r2):.2e}")


if __name__ == "__main__":
    main()
