"""Measure the reproducing constant C for f in {1, z1, z1^2} at two quadrature orders."""
import argparse

import numpy as np

from ballframes import HoloFunction, psi
from ballframes.group import s_from_points
from ballframes.quadrature import rule_for_degree
from ballframes.representation import RepParams, reproducing_constant, reproducing_constant_closed_form


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=1)
    ap.add_argument("--sigma", type=float, default=None, help="default n + 2")
    ap.add_argument("--degree", type=int, default=None, help="quadrature degree (default 24 for n=1, 20 otherwise)")
    ap.add_argument("--points", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    n = args.n
    sigma = args.sigma or n + 2.0
    D = args.degree or (24 if n == 1 else 20)
    p = RepParams(n, sigma)
    rng = np.random.default_rng(args.seed)
    W = rng.standard_normal((args.points, n)) + 1j * rng.standard_normal((args.points, n))
    W *= 0.45 * rng.uniform(size=(args.points, 1)) / np.linalg.norm(W, axis=1, keepdims=True)
    xs = s_from_points(W)
    e1 = (1,) + (0,) * (n - 1)
    fs = {"1": psi(n), "z1": HoloFunction.monomial(e1), "z1^2": HoloFunction.monomial(tuple(2 * k for k in e1))}
    print(f"# n={n} sigma={sigma} closed form {reproducing_constant_closed_form(n, sigma):.17g}")
    print("f,degree,C,max_rel_residual")
    for order in (D, 2 * D):
        rule = rule_for_degree(n, p.alpha, order)
        for name, f in fs.items():
            C, res = reproducing_constant(p, f, xs, rule)
            print(f"{name},{order},{C:.17g},{res:.3e}")


if __name__ == "__main__":
    main()
