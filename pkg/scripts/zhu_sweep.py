"""Empirical norms of Zhu's operator on the radial test family as the cutoff approaches the sphere."""
import argparse

from ballframes.representation import zhu_bounded, zhu_norm_sweep, zhu_parameters


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=1)
    ap.add_argument("--sigma", type=float, default=3.0)
    ap.add_argument("--p", type=float, default=2.0)
    ap.add_argument("--alphas", default="0,1,2.5,3.5")
    ap.add_argument("--decades", type=int, default=6)
    args = ap.parse_args()
    gaps = [10.0 ** -k for k in range(1, args.decades + 1)]
    print("alpha,bounded," + ",".join(f"gap={g:g}" for g in gaps))
    for alpha in map(float, args.alphas.split(",")):
        a, b, t = zhu_parameters(args.n, args.sigma, alpha, args.p)
        ratios = zhu_norm_sweep(args.n, args.sigma, alpha, args.p, gaps)
        print(f"{alpha},{zhu_bounded(a, b, t, args.p)}," + ",".join(f"{r:.6g}" for r in ratios))


if __name__ == "__main__":
    main()
