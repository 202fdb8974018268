"""Frames and atomic decompositions from lattice orbits of the discrete series.

The atoms are g_i = pi_sigma(x_i) zeta.  For the default zeta = 1,

    g_i(z) = conj(d_i)^{-sigma} (1 - <z, w_i>)^{-sigma},   |conj(d_i)^{-sigma}| = (1-|w_i|^2)^{sigma/2},

and <f, g_i> = d_i^{-sigma} f(w_i).  Frame quantities are computed on the
polynomials of degree <= K; coefficient solves use exact Gram matrices.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg

from .bergman import (
    Atom,
    HoloFunction,
    cpow,
    inner_product_exact,
    monomials_eval,
    multi_indices_upto,
    phi_normalizer,
    psi,
    from_onb_coefficients,
    inner_product,
)
from .errors import ConfigError, ConvergenceFailure, DegenerateFamily, DomainError
from .group import GroupElement, inverse_batch
from .quadrature import QuadratureRule, lp_alpha_norm
from .representation import RepParams, pi_transport, wavelet, wavelet_psi
from .sampling import PointFamily

TAU_LIN = 1e-12
TAU_REC = 1e-6
SPECTRAL_CUTOFF = 1e-15


@dataclass(frozen=True)
class CoefficientSeq:
    values: np.ndarray
    exponent: float
    meta: dict = field(default_factory=dict, compare=False)

    def __len__(self):
        return self.values.shape[0]

    def norm(self, family: PointFamily, p: float) -> float:
        return seq_norm(self.values, family, p, self.exponent)


@dataclass(eq=False)
class FrameSystem:
    """A lattice family with its atoms and the target space A^p_alpha.

    ``atom`` is the constant 1 by default or a polynomial; ``K`` is the top
    degree of the polynomial test space.
    """

    family: PointFamily
    sigma: float
    alpha: float
    p: float = 2.0
    K: int = 8
    atom: HoloFunction | None = None

    def __post_init__(self):
        n = self.family.n
        errs = {}
        if not self.sigma > n:
            errs["sigma"] = f"must exceed n={n}"
        if not 1 <= self.p < math.inf:
            errs["p"] = "must lie in [1, inf)"
        elif not -1 < self.alpha < self.p * (self.sigma - n) - 1:
            errs["alpha"] = f"need -1 < alpha < p(sigma-n)-1 = {self.p * (self.sigma - n) - 1:g}"
        if int(self.K) != self.K or self.K < 0:
            errs["K"] = "must be a non-negative integer"
        if self.atom is None:
            self.atom = psi(n)
        elif not self.atom.is_polynomial:
            errs["atom"] = "must be a polynomial"
        if errs:
            raise ConfigError(errs)
        self.params = RepParams(n, self.sigma)

    @property
    def n(self) -> int:
        return self.family.n

    @property
    def psi_atom(self) -> bool:
        m = self.atom.monomials
        return list(m) == [(0,) * self.n] and m[(0,) * self.n] == 1

    @property
    def exponent(self) -> float:
        """Weight exponent of the coefficient norm: alpha + n + 1 - sigma p / 2."""
        return self.alpha + self.n + 1 - self.sigma * self.p / 2

    @property
    def weights(self) -> np.ndarray:
        return self.family.one_minus_r2 ** self.exponent

    @cached_property
    def atom_scale(self) -> np.ndarray:
        """conj(d_i)^{-sigma}: the coefficient of the kernel atom at w_i."""
        return cpow(np.conj(self.family.X[:, -1, -1]), -self.sigma)

    @cached_property
    def gram_matrix(self) -> np.ndarray:
        return _gram(self)

    @cached_property
    def weighted_spectrum(self):
        """eigh of D G D with D = diag(omega^{-1/2}); reused by every spectral solve."""
        Dm = self.weights ** -0.5
        H = Dm[:, None] * gram(self) * Dm[None, :]
        return scipy.linalg.eigh(H)

    def pair_atom(self, i: int) -> GroupElement:
        return GroupElement(self.family.X[i])


# --- analysis / synthesis ------------------------------------------------------

def analysis(sys: FrameSystem, f: HoloFunction) -> CoefficientSeq:
    """c_i = <f, pi_sigma(x_i) zeta> in A^2_{sigma-n-1}."""
    if sys.psi_atom:
        vals = wavelet_psi(sys.params, f, sys.family.X)
    else:
        vals = np.array([wavelet(sys.params, f, sys.atom, sys.pair_atom(i))
                         for i in range(len(sys.family))], dtype=complex)
    return CoefficientSeq(np.asarray(vals, dtype=complex), sys.exponent)


def synthesis(sys: FrameSystem, c, degree: int = 40) -> HoloFunction:
    """sum_i c_i pi_sigma(x_i) zeta."""
    c = np.asarray(getattr(c, "values", c), dtype=complex)
    if c.shape != (len(sys.family),):
        raise DomainError("coefficient length does not match the family")
    if not np.all(np.isfinite(c)):
        raise DomainError("coefficients must be finite")
    n = sys.n
    if sys.psi_atom:
        atoms = [Atom(ci * si, w, sys.sigma)
                 for ci, si, w in zip(c, sys.atom_scale, sys.family.W) if ci != 0]
        return HoloFunction(n, {}, atoms)
    out = HoloFunction.zero(n)
    for i, ci in enumerate(c):
        if ci != 0:
            img, _ = pi_transport(sys.params, sys.pair_atom(i), sys.atom, degree)
            out = out + img.scale(ci)
    return out


def _gram(sys: FrameSystem) -> np.ndarray:
    """G_ij = <g_j, g_i>, so that (G c)_i = <synthesis(c), g_i>."""
    W = sys.family.W
    if sys.psi_atom:
        s = sys.atom_scale
        K = cpow(1.0 - W @ np.conj(W).T, -sys.sigma)
        G = np.conj(s)[:, None] * K * s[None, :]
    else:
        X = sys.family.X
        Xinv = inverse_batch(X)
        m = len(sys.family)
        G = np.empty((m, m), dtype=complex)
        for i in range(m):
            for j in range(i, m):
                y = GroupElement(Xinv[i] @ X[j])
                G[i, j] = np.conj(wavelet(sys.params, sys.atom, sys.atom, y))
                G[j, i] = np.conj(G[i, j])
    return 0.5 * (G + G.conj().T)


def gram(sys: FrameSystem) -> np.ndarray:
    if len(sys.family) == 0:
        raise DegenerateFamily("empty family", value=0.0)
    return sys.gram_matrix


# --- frame bounds ----------------------------------------------------------------

def analysis_matrix(sys: FrameSystem, K: int | None = None, weighted: bool = True) -> np.ndarray:
    """Rows i, columns gamma: <phi_gamma, g_i>, times (1-|w_i|^2)^{e/2} if weighted.

    phi_gamma is the orthonormal monomial basis of A^2_alpha, |gamma| <= K.
    """
    K = sys.K if K is None else K
    n = sys.n
    gammas = multi_indices_upto(n, K)
    if sys.psi_atom:
        P = monomials_eval(sys.family.W, gammas)
        scale = np.array([phi_normalizer(g, sys.alpha) for g in gammas])
        d = sys.family.X[:, -1, -1]
        M = cpow(d, -sys.sigma)[:, None] * P * scale[None, :]
    else:
        M = np.empty((len(sys.family), len(gammas)), dtype=complex)
        for j, g in enumerate(gammas):
            phi = HoloFunction.monomial(g, phi_normalizer(g, sys.alpha))
            M[:, j] = analysis(sys, phi).values
    if weighted:
        M = M * np.sqrt(sys.weights)[:, None]
    return M


@dataclass(frozen=True)
class FrameBounds:
    A_est: float
    B_est: float
    K: int
    A_prev: float = math.nan
    B_prev: float = math.nan

    def __iter__(self):
        return iter((self.A_est, self.B_est))

    @property
    def k_stability(self) -> float:
        """Relative change of (A, B) between degree K-1 and K."""
        return max(abs(self.A_est - self.A_prev) / self.A_est, abs(self.B_est - self.B_prev) / self.B_est)

    @property
    def condition(self) -> float:
        return self.B_est / self.A_est


def _bounds(M: np.ndarray):
    sv = np.linalg.svd(M, compute_uv=False)
    smin = float(sv[-1]) if M.shape[0] >= M.shape[1] else 0.0  # fewer rows than columns: rank deficient
    return smin, float(sv[0])


def frame_bounds(sys: FrameSystem, K: int | None = None) -> FrameBounds:
    """Squared extreme singular values of the weighted analysis matrix (p = 2)."""
    K = sys.K if K is None else K
    if len(sys.family) == 0:
        raise DegenerateFamily("empty family", value=0.0)
    M = analysis_matrix(sys, K)
    smin, smax = _bounds(M)
    if smin < TAU_LIN:
        raise DegenerateFamily(f"not a frame on degree <= {K} polynomials (sigma_min={smin:.3g})", value=smin)
    prev = (math.nan, math.nan)
    if K >= 1:
        n_prev = len(multi_indices_upto(sys.n, K - 1))
        a, b = _bounds(M[:, :n_prev])
        prev = (a * a, b * b)
    return FrameBounds(smin * smin, smax * smax, K, *prev)


def empirical_norm_equiv(sys: FrameSystem, fs, rule: QuadratureRule):
    """Observed (min, max) of sum |c_i|^p (1-|w_i|^2)^e / ||f||^p_{A^p_alpha}."""
    ratios = []
    for f in fs:
        c = analysis(sys, f).values
        num = math.fsum(np.abs(c) ** sys.p * sys.weights)
        den = lp_alpha_norm(f, sys.p, sys.alpha, rule) ** sys.p
        ratios.append(num / den)
    return min(ratios), max(ratios)


# --- coefficients ------------------------------------------------------------------

def seq_norm(c, family: PointFamily, p: float, e: float) -> float:
    """(sum |c_i|^p (1-|w_i|^2)^e)^{1/p}."""
    if not 1 <= p < math.inf:
        raise DomainError("p must lie in [1, inf)")
    c = np.asarray(getattr(c, "values", c))
    return math.fsum(np.abs(c) ** p * family.one_minus_r2 ** e) ** (1.0 / p)


def _norm2_sigma(sys: FrameSystem, f: HoloFunction) -> float:
    return inner_product_exact(f, f, sys.sigma).real


def _cg(H, rhs, maxiter, tol):
    """Plain CG from zero (stays in range(H), so it targets the minimum-norm solution)."""
    x = np.zeros_like(rhs)
    r = rhs.copy()
    pvec = r.copy()
    rr = np.vdot(r, r).real
    target = (tol * np.linalg.norm(rhs)) ** 2
    best = rr
    stall = 0
    for it in range(maxiter):
        if rr <= target:
            return x, it, True
        Hp = H @ pvec
        step = rr / np.vdot(pvec, Hp).real
        x = x + step * pvec
        r = r - step * Hp
        rr_new = np.vdot(r, r).real
        pvec = r + (rr_new / rr) * pvec
        rr = rr_new
        if rr < 0.999 * best:
            best, stall = rr, 0
        else:
            stall += 1
            if stall > 50:
                return x, it, False
    return x, maxiter, rr <= target


def _solve_min_norm(sys: FrameSystem, rhs: np.ndarray, method: str, f_norm2=None, lam: float = 0.0):
    """Minimum weighted-norm c with G c = rhs (in the least-squares sense).

    Works in c~ = omega^{1/2} c, omega = (1-|w_i|^2)^e, so the minimum Euclidean
    norm of c~ is the minimum weighted norm of c.
    """
    G = gram(sys)
    Dm = sys.weights ** -0.5
    H = Dm[:, None] * G * Dm[None, :]
    b = Dm * rhs
    meta = {"method": method, "regularization": lam}
    if method == "spectral":
        if lam == 0.0:
            lam_, V = sys.weighted_spectrum
        else:
            lam_, V = scipy.linalg.eigh(H + lam * np.eye(len(H)))
        keep = lam_ > SPECTRAL_CUTOFF * lam_[-1]
        ct = V[:, keep] @ ((V[:, keep].conj().T @ b) / lam_[keep])
        meta["rank"] = int(keep.sum())
    elif method == "cg":
        maxiter = 10 * len(H)
        ct, its, ok = _cg(H + lam * np.eye(len(H)), b, maxiter, 1e-14)
        if not ok and lam == 0.0:
            B_est = float(np.linalg.norm(H, 2))
            reg = 1e-10 * B_est
            warnings.warn(f"CG stagnated; retrying with regularization {reg:.3g}")
            return _solve_min_norm(sys, rhs, method, f_norm2, reg)
        meta["iterations"] = its
        meta["converged"] = bool(ok)
    else:
        raise DomainError(f"unknown solver {method!r}")
    return Dm * ct, meta


def decompose(sys: FrameSystem, f: HoloFunction, method: str = "spectral", tol: float = TAU_REC):
    """Coefficients c with synthesis(c) closest to f in A^2_{sigma-n-1}.

    Returns (CoefficientSeq, relative residual).  Among all least-squares
    solutions the one with the smallest weighted l^2 norm is returned.
    """
    b = analysis(sys, f).values
    f2 = _norm2_sigma(sys, f)
    c, meta = _solve_min_norm(sys, b, method)
    G = gram(sys)
    res2 = f2 - 2 * np.vdot(c, b).real + np.vdot(c, G @ c).real
    resid = math.sqrt(max(res2, 0.0) / f2) if f2 > 0 else 0.0
    if method == "cg" and not meta.get("converged", True) and resid > tol:
        raise ConvergenceFailure(f"CG did not converge (residual {resid:.3g})")
    meta["seq_norm"] = seq_norm(c, sys.family, sys.p, sys.exponent)
    return CoefficientSeq(c, sys.exponent, meta), resid


def reconstruct_from_samples(sys: FrameSystem, samples, method: str = "polynomial") -> HoloFunction:
    """Recover f from c_i = <f, g_i>.

    ``polynomial``: weighted least squares for the coordinates of f in the
    orthonormal basis of A^2_alpha up to degree K.  ``atoms``: orthogonal
    projection of f onto the span of the atoms, via the Gram system.
    """
    c = np.asarray(getattr(samples, "values", samples), dtype=complex)
    if method == "polynomial":
        M = analysis_matrix(sys, weighted=False)
        sw = np.sqrt(sys.weights)
        beta, *_ = np.linalg.lstsq(M * sw[:, None], c * sw, rcond=None)
        return from_onb_coefficients(beta, sys.n, sys.alpha, sys.K)
    if method == "atoms":
        coef, _ = _solve_min_norm(sys, c, "spectral")
        return synthesis(sys, coef)
    raise DomainError(f"unknown reconstruction method {method!r}")


def relative_error(g: HoloFunction, f: HoloFunction, alpha: float, rule: QuadratureRule | None = None) -> float:
    """||g - f|| / ||f|| in A^2_alpha.

    The exact route expands ||g - f||^2 over all atom pairs and cannot resolve
    errors much below sqrt(eps) * ||coefficients||.  With ``rule`` the
    difference is evaluated pointwise and integrated instead.
    """
    if rule is not None:
        return lp_alpha_norm(g - f, 2, alpha, rule) / lp_alpha_norm(f, 2, alpha, rule)
    diff = g - f
    return math.sqrt(max(inner_product(diff, diff, alpha).real, 0.0) / inner_product(f, f, alpha).real)


# --- Riesz bounds ---------------------------------------------------------------------

def riesz_lower_bound(sys: FrameSystem, mode: str = "spectral", rule: QuadratureRule | None = None,
                      samples: int = 500, seed: int = 0):
    """p = 2: lambda_min(G)^{1/2}.  ``empirical``: observed range of
    ||synthesis(c)||_{A^p_{sigma p/2 - n - 1}} / ||c||_p over seeded random c.
    """
    if mode == "spectral":
        lam = float(scipy.linalg.eigvalsh(gram(sys))[0])
        if lam < TAU_LIN:
            raise DegenerateFamily(f"atoms are numerically dependent (lambda_min={lam:.3g})", value=lam)
        return math.sqrt(lam)
    if mode == "empirical":
        if rule is None:
            raise DomainError("empirical mode needs a quadrature rule")
        rng = np.random.default_rng(seed)
        beta = sys.sigma * sys.p / 2 - sys.n - 1
        m = len(sys.family)
        ratios = []
        for _ in range(samples):
            c = rng.standard_normal(m) + 1j * rng.standard_normal(m)
            g = synthesis(sys, c)
            num = lp_alpha_norm(g, sys.p, beta, rule)
            ratios.append(num / np.sum(np.abs(c) ** sys.p) ** (1 / sys.p))
        return float(min(ratios)), float(max(ratios))
    raise DomainError(f"unknown mode {mode!r}")
