"""Acceptance suite: one test per numbered criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` or ``python tests/test_acceptance.py``.
"""
import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import ACCEPTANCE_LINES  # noqa: E402
from ballframes.bergman import (  # noqa: E402
    HoloFunction, kernel_eval, kernel_partial_sum, monomial_norm, multi_indices_upto, psi,
)
from ballframes.errors import DegenerateFamily  # noqa: E402
from ballframes.frames import (  # noqa: E402
    FrameSystem, analysis, decompose, frame_bounds, gram, reconstruct_from_samples,
    relative_error, riesz_lower_bound,
)
from ballframes.group import (  # noqa: E402
    GroupElement, J_matrix, cocycle_check, inverse_batch, orbit_origin, s_from_coords_batch,
    s_from_points,
)
from ballframes.quadrature import rule_for_degree  # noqa: E402
from ballframes.representation import (  # noqa: E402
    RepParams, coorbit_norm, reproducing_constant, wavelet_psi, zhu_norm_sweep,
)
from ballframes.sampling import (  # noqa: E402
    PointFamily, density_check, generate_lattice, probe_points,
)

pytestmark = pytest.mark.acceptance



def _report(num, ok, detail, elapsed, limit):
    ok = bool(ok) and elapsed <= limit
    line = f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}  [{elapsed:.1f}s / {limit:.0f}s]"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def _poly(n, rng, deg):
    gs = multi_indices_upto(n, deg)
    c = rng.standard_normal(len(gs)) + 1j * rng.standard_normal(len(gs))
    return HoloFunction(n, dict(zip(gs, c)))


def _ball_points(rng, m, n, rmax):
    W = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
    W /= np.linalg.norm(W, axis=1, keepdims=True)
    return W * (rmax * rng.uniform(size=(m, 1)) ** (1 / (2 * n)))


def test_criterion_01_monomial_norms():
    t0 = time.perf_counter()
    worst = 0.0
    for n in (1, 2, 3):
        for alpha in (0.0, 1.5, 3.0):
            rule = rule_for_degree(n, alpha, 8)  # z^gamma conj(z)^delta exact for |gamma|, |delta| <= 8
            assert rule.exactness_degree == 8
            for g in multi_indices_upto(n, 8):
                vals = np.prod(np.abs(rule.nodes) ** (2 * np.array(g)), axis=1)
                exact = monomial_norm(g, alpha)
                worst = max(worst, abs(rule.integrate_real(vals) - exact) / exact)
    ok = worst <= 1e-9
    assert _report(1, ok, f"max rel err {worst:.2e} (tol 1e-9)", time.perf_counter() - t0, 30)


def test_criterion_02_group_identities():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    worst = {"inverse": 0.0, "form": 0.0, "cocycle": 0.0}
    for n in (1, 2, 3):
        X = s_from_coords_batch(rng.uniform(-1, 1, (1000, 2 * n)))
        Y = s_from_coords_batch(rng.uniform(-1, 1, (1000, 2 * n)))
        J = J_matrix(n)
        Jx = J @ np.conj(np.transpose(X, (0, 2, 1))) @ J
        worst["inverse"] = max(worst["inverse"], np.max(np.abs(inverse_batch(X) - Jx)),
                               np.max(np.abs(X @ Jx - np.eye(n + 1))))
        form = np.abs(X[:, -1, -1]) ** 2 - np.sum(np.abs(X[:, :-1, -1]) ** 2, axis=1) - 1
        worst["form"] = max(worst["form"], np.max(np.abs(form)))
        for x, y in zip(X, Y):
            worst["cocycle"] = max(worst["cocycle"], cocycle_check(GroupElement(y), GroupElement(x)))
    ok = max(worst.values()) <= 1e-12
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    assert _report(2, ok, detail + " (tol 1e-12)", time.perf_counter() - t0, 5)


def test_criterion_03_wavelet_modulus():
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    worst = 0.0
    for n in (1, 2, 3):
        X = s_from_coords_batch(rng.uniform(-2, 2, (1000, 2 * n)))
        W = orbit_origin(X)
        om = 1 - np.sum(np.abs(W) ** 2, axis=1)
        for sigma in (n + 0.5, n + 1.0, 2 * n + 1.0):
            lhs = np.abs(wavelet_psi(RepParams(n, sigma), psi(n), X))
            worst = max(worst, np.max(np.abs(lhs - om ** (sigma / 2))))
    assert _report(3, worst <= 1e-12, f"max abs err {worst:.2e} (tol 1e-12)", time.perf_counter() - t0, 5)


def test_criterion_04_reproducing_constant():
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    spread, drift, resid = 0.0, 0.0, 0.0
    for n, D in ((1, 24), (2, 20)):
        p = RepParams(n, n + 2.0)
        xs = s_from_points(_ball_points(rng, 20, n, 0.45))
        fs = [psi(n), HoloFunction.monomial((1,) + (0,) * (n - 1)), HoloFunction.monomial((2,) + (0,) * (n - 1))]
        Cs = {}
        for order in (D, 2 * D):
            rule = rule_for_degree(n, p.alpha, order)
            Cs[order] = []
            for f in fs:
                C, r = reproducing_constant(p, f, xs, rule)
                Cs[order].append(C)
                if order == D:
                    resid = max(resid, r)
        spread = max(spread, (max(Cs[D]) - min(Cs[D])) / np.mean(Cs[D]))
        drift = max(drift, max(abs(a - b) / abs(b) for a, b in zip(Cs[D], Cs[2 * D])))
    ok = spread <= 1e-5 and resid <= 1e-5 and drift <= 1e-7
    detail = f"f-spread {spread:.1e}, x-residual {resid:.1e} (tol 1e-5), doubling {drift:.1e} (tol 1e-7)"
    assert _report(4, ok, detail, time.perf_counter() - t0, 300)


def test_criterion_05_kernel_tail():
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    worst = 0.0
    for n, K in ((1, 15), (2, 25)):
        for j in range(20):
            u = 0.35 + 0.35 * j / 19
            z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            z /= np.linalg.norm(z)
            w = z * np.exp(2j * math.pi * rng.uniform())
            z, w = z * math.sqrt(u), w * math.sqrt(u)
            full = kernel_eval(z, w, 0.0)
            t1 = abs(full - kernel_partial_sum(z, w, 0.0, K))
            t2 = abs(full - kernel_partial_sum(z, w, 0.0, K + 1))
            worst = max(worst, abs(t2 / t1 / abs(np.vdot(w, z)) - 1))
    assert _report(5, worst <= 0.10, f"max |ratio/|<z,w>| - 1| = {worst:.3f} (tol 0.10)",
                   time.perf_counter() - t0, 10)


def test_criterion_06_zhu_region():
    t0 = time.perf_counter()
    gaps = [10.0 ** -k for k in range(1, 7)]
    stable = {a: zhu_norm_sweep(1, 3.0, a, 2.0, gaps) for a in (0.0, 1.0)}
    grow = zhu_norm_sweep(1, 3.0, 3.5, 2.0, gaps)
    spread = max(np.max(v) / np.min(v) for v in stable.values())
    factor = grow[-1] / grow[0]
    ok = spread < 1.1 and bool(np.all(np.diff(grow) > 0)) and factor >= 10
    detail = f"inside max/min {spread:.3f}, outside growth x{factor:.1f} monotone={bool(np.all(np.diff(grow) > 0))}"
    assert _report(6, ok, detail, time.perf_counter() - t0, 120)


def _frame_suite(n, sigma, eps, box, K, tol, seed):
    sys_ = FrameSystem(generate_lattice(eps, box, n), sigma, 0.0, 2.0, K)
    A, B = frame_bounds(sys_)
    rng = np.random.default_rng(seed)
    fs = [HoloFunction.monomial(g) for g in multi_indices_upto(n, K)] + [_poly(n, rng, K) for _ in range(5)]
    rec = max(relative_error(reconstruct_from_samples(sys_, analysis(sys_, f)), f, 0.0) for f in fs)
    c, res = decompose(sys_, HoloFunction.monomial((1,) + (0,) * (n - 1)))
    ok = A > 0 and rec <= tol and res <= tol and math.isfinite(c.meta["seq_norm"])
    return ok, f"n={n}: A {A:.3g}, B {B:.3g}, recon {rec:.1e}, decomp residual {res:.1e} (tol {tol:g})"


def test_criterion_07_frames_n1():
    t0 = time.perf_counter()
    ok, detail = _frame_suite(1, 3.0, 0.1, 1.5, 8, 1e-6, 7)
    assert _report(7, ok, detail, time.perf_counter() - t0, 120)


def test_criterion_07_frames_n2():
    t0 = time.perf_counter()
    ok, detail = _frame_suite(2, 4.0, 0.2, 1.2, 5, 1e-5, 8)
    assert _report(7, ok, detail, time.perf_counter() - t0, 600)


def test_criterion_08_refinement():
    t0 = time.perf_counter()
    f = HoloFunction.monomial((2,))
    probes = probe_points(1, 1.5, 0.05)
    qrule = rule_for_degree(1, 1.0, 200)
    A, cov, err = [], [], []
    for eps in (0.4, 0.2, 0.1):
        sys_ = FrameSystem(generate_lattice(eps, 1.5, 1), 3.0, 0.0, 2.0, 8)
        A.append(np.linalg.svd(_weighted(sys_), compute_uv=False)[-1] ** 2)
        cov.append(density_check(sys_.family, 0.25, probes))
        g = reconstruct_from_samples(sys_, analysis(sys_, f), method="atoms")
        err.append(relative_error(g, f, 1.0, rule=qrule))
    mono = lambda v: all(b >= a for a, b in zip(v, v[1:]))
    nonincr = all(b <= max(a, 1e-12) for a, b in zip(err, err[1:]))
    ok = mono(A) and mono(cov) and nonincr
    detail = f"A {[f'{a:.3g}' for a in A]}, coverage {[f'{c:.3f}' for c in cov]}, error {[f'{e:.1e}' for e in err]}"
    assert _report(8, ok, detail, time.perf_counter() - t0, 300)


def _weighted(sys_):
    from ballframes.frames import analysis_matrix
    return analysis_matrix(sys_)


def test_criterion_09_riesz():
    t0 = time.perf_counter()
    fam = PointFamily.from_points(np.array([[0.0], [0.5]]))
    sys_ = FrameSystem(fam, 2.0, 0.0)
    G12 = abs(gram(sys_)[0, 1])
    err = abs(riesz_lower_bound(sys_) ** 2 - (1 - G12))
    try:
        riesz_lower_bound(FrameSystem(generate_lattice(0.05, 1.5, 1), 3.0, 0.0))
        degenerate = False
    except DegenerateFamily:
        degenerate = True
    ok = err <= 1e-12 and degenerate
    assert _report(9, ok, f"|lambda_min - (1-|G12|)| = {err:.1e}, dense family degenerate={degenerate}",
                   time.perf_counter() - t0, 5)


def test_criterion_10_sigma_independence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(10)
    fam = generate_lattice(0.1, 1.5, 1)
    s1, s2 = FrameSystem(fam, 3.0, 0.0, 2.0, 8), FrameSystem(fam, 4.0, 0.0, 2.0, 8)
    rule = rule_for_degree(1, 0.0, 12)
    disc, cont, res = [], [], 0.0
    for _ in range(20):
        f = _poly(1, rng, 5)
        c1, r1 = decompose(s1, f)
        c2, r2 = decompose(s2, f)
        res = max(res, r1, r2)
        disc.append(c1.meta["seq_norm"] / c2.meta["seq_norm"])
        cont.append(coorbit_norm(s1.params, f, 2, 0.0, rule) / coorbit_norm(s2.params, f, 2, 0.0, rule))
    c = max(max(disc), 1 / min(disc))
    ok = c < 10 and res <= 1e-6 and max(abs(np.array(cont) - 1)) <= 1e-10
    detail = (f"coefficient-norm ratio in [{min(disc):.3f}, {max(disc):.3f}] (c={c:.3f} < 10), "
              f"continuous ratio dev {max(abs(np.array(cont) - 1)):.1e}, residual {res:.1e}")
    assert _report(10, ok, detail, time.perf_counter() - t0, 120)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
