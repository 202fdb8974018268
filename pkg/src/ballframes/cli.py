"""Command-line entry point: ``ballframes <command> --config cfg.json --out DIR``."""
from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import bergman, frames, group, quadrature, representation, sampling
from .config import ExperimentConfig, load_function
from .errors import BallFramesError, ConfigError
from .io import coefficient_records, family_records, write_csv, write_json

COMMANDS = ("verify", "lattice", "frame-bounds", "decompose", "reconstruct")


# --- helpers ---------------------------------------------------------------------

def _family(cfg: ExperimentConfig):
    return sampling.generate_lattice(cfg.epsilon, cfg.box_radius, cfg.n, capacity=cfg.capacity)


def _system(cfg: ExperimentConfig, family=None):
    atom = None if cfg.atom == "psi" else cfg.atom_function()
    return frames.FrameSystem(family or _family(cfg), cfg.sigma, cfg.alpha, cfg.p, cfg.K, atom)


def _default_function(cfg: ExperimentConfig):
    return bergman.HoloFunction.monomial((1,) + (0,) * (cfg.n - 1))


def _check(name, residual, tol):
    ok = bool(np.isfinite(residual) and residual <= tol)
    return {"name": name, "passed": ok, "residual": float(residual), "tolerance": float(tol)}


# --- commands ----------------------------------------------------------------------

def cmd_verify(cfg: ExperimentConfig, out: Path, function=None) -> dict:
    """Run the package invariants at the configured parameters."""
    n, sigma, alpha = cfg.n, cfg.sigma, cfg.alpha
    rng = np.random.default_rng(cfg.seed)
    checks = []

    T = rng.uniform(-1, 1, size=(200, 2 * n))
    X = group.s_from_coords_batch(T)
    Y = group.s_from_coords_batch(rng.uniform(-1, 1, size=(200, 2 * n)))
    J = group.J_matrix(n)
    inv_err = np.max(np.abs(group.inverse_batch(X) - J @ np.conj(np.transpose(X, (0, 2, 1))) @ J))
    form_err = np.max(np.abs(np.abs(X[:, -1, -1]) ** 2 - np.sum(np.abs(X[:, :-1, -1]) ** 2, axis=1) - 1))
    coc = max(group.cocycle_check(group.GroupElement(y), group.GroupElement(x)) for x, y in zip(X, Y))
    checks += [_check("group.inverse", inv_err, 1e-12), _check("group.form", form_err, 1e-12),
               _check("group.cocycle", coc, 1e-12)]

    p = representation.RepParams(n, sigma)
    W = group.orbit_origin(X)
    cor = np.abs(representation.wavelet_psi(p, bergman.psi(n), X)) - (1 - np.sum(np.abs(W) ** 2, 1)) ** (sigma / 2)
    checks.append(_check("representation.modulus_identity", np.max(np.abs(cor)), 1e-12))

    D = min(cfg.K, 8)
    rule = quadrature.rule_for_degree(n, alpha, D)
    checks.append(_check("quadrature.monomial_norms", quadrature.certify_exactness(rule, full=True), 1e-9))

    z = np.full(n, 0.5 / math.sqrt(n), dtype=complex)
    w = np.full(n, 0.6 / math.sqrt(n), dtype=complex)
    kerr = abs(bergman.kernel_partial_sum(z, w, alpha, 60) - bergman.kernel_eval(z, w, alpha))
    checks.append(_check("bergman.kernel_partial_sum", kerr / abs(bergman.kernel_eval(z, w, alpha)), 1e-9))

    dconv = 24 if n == 1 else 14
    crule = quadrature.rule_for_degree(n, p.alpha, dconv)
    xs = group.s_from_points(0.3 * rng.uniform(size=(5, n)) * np.exp(2j * np.pi * rng.uniform(size=(5, n))) / math.sqrt(n))
    C, res = representation.reproducing_constant(p, bergman.psi(n), xs, crule)
    checks.append(_check("representation.reproducing_residual", res, 1e-5))
    checks.append(_check("representation.reproducing_constant",
                         abs(C / representation.reproducing_constant_closed_form(n, sigma) - 1), 1e-5))

    zp = rng.uniform(-0.4, 0.4, size=(20, n)) + 1j * rng.uniform(-0.4, 0.4, size=(20, n))
    wp = rng.uniform(-0.4, 0.4, size=(20, n)) + 1j * rng.uniform(-0.4, 0.4, size=(20, n))
    rho0 = sampling.pseudo_hyperbolic_distance(zp, wp)
    rho1 = sampling.pseudo_hyperbolic_distance(group.act_batch(X[:1], zp), group.act_batch(X[:1], wp))
    checks.append(_check("sampling.rho_invariance", np.max(np.abs(rho0 - rho1)), 1e-12))

    sysf = _system(cfg)
    h = function or _default_function(cfg)
    c = rng.standard_normal(len(sysf.family)) + 1j * rng.standard_normal(len(sysf.family))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        syn = frames.synthesis(sysf, c)
    lhs = bergman.inner_product(h, syn, p.alpha) if sysf.psi_atom else None
    if lhs is not None:
        rhs = np.sum(np.conj(c) * frames.analysis(sysf, h).values)
        checks.append(_check("frames.adjointness", abs(lhs - rhs) / max(abs(rhs), 1e-300), 1e-10))
    fb = frames.frame_bounds(sysf)
    M = frames.analysis_matrix(sysf)
    beta = rng.standard_normal((M.shape[1], 20)) + 1j * rng.standard_normal((M.shape[1], 20))
    ratio = np.sum(np.abs(M @ beta) ** 2, 0) / np.sum(np.abs(beta) ** 2, 0)
    slack = max(float(np.max(fb.A_est - ratio)), float(np.max(ratio - fb.B_est)), 0.0)
    checks.append(_check("frames.sandwich", slack / fb.B_est, 1e-9))
    # the admissible alpha range must coincide with Zhu's boundedness region
    bounded = representation.zhu_bounded(*representation.zhu_parameters(n, sigma, alpha, cfg.p), cfg.p)
    checks.append(_check("representation.zhu_region", 0.0 if bounded else 1.0, 0.0))

    passed = all(ch["passed"] for ch in checks)
    return {"checks": checks, "passed": passed, "frame_bounds": {"A_est": fb.A_est, "B_est": fb.B_est}}


def cmd_lattice(cfg: ExperimentConfig, out: Path, function=None) -> dict:
    fam = _family(cfg)
    write_json(out / "family.json", family_records(fam))
    sep = sampling.min_separation(fam)
    return {
        "count": len(fam),
        "max_abs_w": float(np.max(np.abs(fam.W))) if len(fam) else 0.0,
        "min_separation": sep if math.isfinite(sep) else None,
        "adjacent_max_distance": sampling.adjacent_max_distance(fam) if len(fam) > 1 else 0.0,
    }


def cmd_frame_bounds(cfg: ExperimentConfig, out: Path, function=None) -> dict:
    fb = frames.frame_bounds(_system(cfg))
    return {"A_est": fb.A_est, "B_est": fb.B_est, "K": fb.K,
            "A_prev": fb.A_prev, "B_prev": fb.B_prev, "k_stability": fb.k_stability}


def cmd_decompose(cfg: ExperimentConfig, out: Path, function=None) -> dict:
    sysf = _system(cfg)
    f = function or _default_function(cfg)
    c, resid = frames.decompose(sysf, f, method=cfg.solver)
    write_json(out / "coefficients.json", coefficient_records(c.values))
    return {"residual": resid, "seq_norm": c.meta["seq_norm"], "exponent": c.exponent,
            "count": len(c), "solver": c.meta}


def cmd_reconstruct(cfg: ExperimentConfig, out: Path, function=None) -> dict:
    sysf = _system(cfg)
    f = function or bergman.HoloFunction.monomial((2,) + (0,) * (cfg.n - 1))
    samples = frames.analysis(sysf, f)
    g = frames.reconstruct_from_samples(sysf, samples)
    err = frames.relative_error(g, f, cfg.alpha)
    beta = bergman.onb_coefficients(g, cfg.alpha, cfg.K)
    write_json(out / "coefficients.json", coefficient_records(beta))
    return {"relative_error": err, "count": len(sysf.family), "K": cfg.K}


HANDLERS = {
    "verify": cmd_verify,
    "lattice": cmd_lattice,
    "frame-bounds": cmd_frame_bounds,
    "decompose": cmd_decompose,
    "reconstruct": cmd_reconstruct,
}


# --- sweeps ------------------------------------------------------------------------

def parse_sweep(text: str):
    if "=" not in text:
        raise ConfigError({"sweep": "expected KEY=v1,v2,..."})
    key, vals = text.split("=", 1)
    key = key.strip()
    out = []
    for v in vals.split(","):
        try:
            out.append(json.loads(v))
        except json.JSONDecodeError:
            out.append(v.strip())
    if not out:
        raise ConfigError({"sweep": "no values"})
    return key, out


def run(command: str, cfg: ExperimentConfig, out: Path, sweep=None, threads: int = 1, function=None):
    handler = HANDLERS[command]
    if sweep is None:
        results = handler(cfg, out, function)
        report = {"command": command, "config": cfg.to_dict(), "results": results, "sweep": None}
        write_json(out / "report.json", report)
        write_csv(out / "summary.csv", [_flat(results)])
        return report
    key, values = sweep
    cfgs = [ExperimentConfig.from_dict({**cfg.to_dict(), key: v}) for v in values]
    dirs = [out / f"{key}={v}" for v in values]

    def one(i):
        return handler(cfgs[i], dirs[i], function)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        results = list(pool.map(one, range(len(cfgs))))
    rows = [{key: v, **_flat(r)} for v, r in zip(values, results)]
    report = {"command": command, "config": cfg.to_dict(),
              "results": {"runs": [{key: v, **r} for v, r in zip(values, results)]},
              "sweep": {"key": key, "values": values}}
    write_json(out / "report.json", report)
    write_csv(out / "summary.csv", rows)
    return report


def _flat(results: dict) -> dict:
    return {k: v for k, v in results.items() if isinstance(v, (int, float, str, bool)) or v is None}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ballframes", description=__doc__)
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", type=Path, help="JSON experiment configuration")
    ap.add_argument("--out", type=Path, help="output directory (default: config 'output')")
    ap.add_argument("--sweep", help="KEY=v1,v2,... run once per value")
    ap.add_argument("--threads", type=int, default=1, help="worker threads for sweeps")
    ap.add_argument("--function", type=Path, help="input polynomial (function schema)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
        out = args.out or Path(cfg.output)
        sweep = parse_sweep(args.sweep) if args.sweep else None
        fn = load_function(args.function, cfg.n) if args.function else None
        report = run(args.command, cfg, out, sweep, args.threads, fn)
    except BallFramesError as exc:
        payload = {"error": type(exc).__name__, "message": str(exc), "code": exc.code}
        if isinstance(exc, ConfigError):
            payload["fields"] = exc.errors
        print(json.dumps(payload), file=sys.stderr)
        return exc.code
    if args.command == "verify" and not report["results"].get("passed", True):
        print(json.dumps({"error": "VerificationFailed", "code": 3}), file=sys.stderr)
        return 3
    print(str(out / "report.json"))
    return 0


if __name__ == "__main__":
    sys.exit(main())
