"""Frame bounds, coverage and reconstruction error along a nested epsilon sweep."""
import argparse

from ballframes import HoloFunction
from ballframes.frames import FrameSystem, analysis, frame_bounds, reconstruct_from_samples, relative_error
from ballframes.errors import DegenerateFamily
from ballframes.quadrature import rule_for_degree
from ballframes.sampling import density_check, generate_lattice, min_separation, probe_points


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=1)
    ap.add_argument("--sigma", type=float, default=3.0)
    ap.add_argument("--alpha", type=float, default=0.0)
    ap.add_argument("--box", type=float, default=1.5)
    ap.add_argument("--K", type=int, default=8)
    ap.add_argument("--eps", default="0.4,0.2,0.1")
    args = ap.parse_args()
    n = args.n
    f = HoloFunction.monomial((2,) + (0,) * (n - 1))
    probes = probe_points(n, args.box, 0.05 if n == 1 else 0.2)
    qrule = rule_for_degree(n, args.sigma - n - 1, 200 if n == 1 else 40)
    print("epsilon,points,min_sep,coverage,A_est,B_est,k_stability,recon_error_atoms")
    for eps in map(float, args.eps.split(",")):
        sys_ = FrameSystem(generate_lattice(eps, args.box, n), args.sigma, args.alpha, 2.0, args.K)
        try:
            fb = frame_bounds(sys_)
            A, B, ks = fb.A_est, fb.B_est, fb.k_stability
        except DegenerateFamily as exc:
            A, B, ks = exc.value ** 2, float("nan"), float("nan")
        g = reconstruct_from_samples(sys_, analysis(sys_, f), method="atoms")
        err = relative_error(g, f, args.sigma - n - 1, rule=qrule)
        cov = density_check(sys_.family, 0.25, probes)
        print(f"{eps},{len(sys_.family)},{min_separation(sys_.family):.6g},{cov:.5f},{A:.6g},{B:.6g},{ks:.3g},{err:.3e}")


if __name__ == "__main__":
    main()
