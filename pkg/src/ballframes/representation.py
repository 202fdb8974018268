"""The scalar holomorphic discrete series of SU(n,1) on the ball.

pi_sigma(x) f(z) = (conj(d) - <z, b>)^{-sigma} f((a^* z - conj(c)) / (conj(d) - <z, b>))

acts unitarily on A^2_{sigma-n-1}.  Powers use the principal branch; on the
solvable subgroup S every d has positive real part, so the branches are
consistent there and pi restricted to S is an honest representation.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, hyp2f1, roots_legendre

from .bergman import (
    Atom,
    HoloFunction,
    c_alpha,
    cpow,
    monomial_norm,
    multi_indices_upto,
    psi,
)
from .errors import (
    ConvergenceFailure,
    DomainError,
    NumericalBlowup,
    TruncationWarning,
    UnsupportedAtomExponent,
)
from .group import (
    GroupElement,
    as_coords,
    herm,
    inverse,
    inverse_batch,
    orbit_origin,
    s_from_points,
)
from .quadrature import QuadratureRule, chunked_fsum, invariant_weight

TRUNCATION_DEGREE = 40
BLOWUP_GUARD = 1e200


@dataclass(frozen=True)
class RepParams:
    n: int
    sigma: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n}")
        if not self.sigma > self.n:
            raise DomainError(f"sigma must exceed n={self.n}, got {self.sigma}")

    @property
    def alpha(self) -> float:
        """Weight of the Hilbert space the representation acts on."""
        return self.sigma - self.n - 1

    @property
    def integer_sigma(self) -> bool:
        return float(self.sigma).is_integer()


def _as_matrices(xs) -> np.ndarray:
    if isinstance(xs, GroupElement):
        return xs.matrix[None]
    if isinstance(xs, (list, tuple)):
        return np.stack([x.matrix if isinstance(x, GroupElement) else np.asarray(x) for x in xs])
    X = np.asarray(xs, dtype=complex)
    return X[None] if X.ndim == 2 else X


# --- pointwise action --------------------------------------------------------

def pi_apply_pointwise(params: RepParams, x: GroupElement, f, z):
    """(pi_sigma(x) f)(z); z may be a single point or an (m, n) batch."""
    z = as_coords(z) if not (isinstance(z, np.ndarray) and z.ndim == 2) else z.astype(complex)
    Z = np.atleast_2d(z)
    den = np.conj(x.d) - herm(Z, x.b)
    arg = (Z @ np.conj(x.a) - np.conj(x.c)) / den[:, None]
    if np.any(np.sum(np.abs(arg) ** 2, axis=1) >= 1.0):
        raise DomainError("transformed point left the ball")
    out = cpow(den, -params.sigma) * np.asarray(f(arg))
    return out[0] if z.ndim == 1 else out


def pi_apply_atom(params: RepParams, x: GroupElement) -> HoloFunction:
    """pi_sigma(x) psi = conj(d)^{-sigma} (1 - <z, x.o>)^{-sigma}."""
    w = x.b / x.d
    return HoloFunction.atom(w, params.sigma, complex(cpow(np.conj(x.d), -params.sigma)))


def pi_apply(params: RepParams, x: GroupElement, f: HoloFunction) -> HoloFunction:
    """Exact image of f when f is a combination of the constant and sigma-atoms.

    An atom with centre v and exponent sigma goes to
    kappa^{-sigma} (1 - <z, u / conj(kappa)>)^{-sigma},
    kappa = conj(d + c.v), u = b + a v.
    """
    if any(sum(g) > 0 and c != 0 for g, c in f.monomials.items()):
        raise UnsupportedAtomExponent("pi_apply is closed only on constants and sigma-atoms; use pi_transport")
    out = pi_apply_atom(params, x).scale(f.monomials.get((0,) * f.n, 0))
    atoms = []
    for at in f.atoms:
        if at.exponent != params.sigma:
            raise UnsupportedAtomExponent(f"atom exponent {at.exponent} != sigma={params.sigma}")
        kappa = np.conj(x.d + x.c @ at.center)
        u = x.b + x.a @ at.center
        atoms.append(Atom(at.coef * complex(cpow(kappa, -params.sigma)), u / np.conj(kappa), params.sigma))
    return out + HoloFunction(f.n, {}, atoms)


# --- truncated Taylor expansions ---------------------------------------------

class _Series:
    """Taylor coefficients up to a fixed total degree, stored on the multi-index table."""

    def __init__(self, n: int, K: int, coef=None):
        self.n, self.K = n, K
        self.gammas = multi_indices_upto(n, K)
        self.index = {g: i for i, g in enumerate(self.gammas)}
        self.deg = np.array([sum(g) for g in self.gammas])
        self.coef = np.zeros(len(self.gammas), dtype=complex) if coef is None else coef

    def like(self, coef=None):
        s = _Series.__new__(_Series)
        s.n, s.K, s.gammas, s.index, s.deg = self.n, self.K, self.gammas, self.index, self.deg
        s.coef = np.zeros_like(self.coef) if coef is None else coef
        return s

    @classmethod
    def atom(cls, n, K, center, s):
        out = cls(n, K)
        G = np.array(out.gammas)
        logc = (gammaln(s + out.deg) - gammaln(s)
                - np.sum(gammaln(G + 1.0), axis=1))
        wbar = np.conj(np.asarray(center, dtype=complex))
        with np.errstate(divide="ignore", invalid="ignore"):
            powers = np.prod(np.where(G == 0, 1.0, wbar[None, :] ** G), axis=1)
        out.coef = np.exp(logc) * powers
        return out

    def mul(self, other: "_Series") -> "_Series":
        out = self.like()
        nz = np.flatnonzero(other.coef)
        for i in np.flatnonzero(self.coef):
            gi = self.gammas[i]
            room = self.K - self.deg[i]
            for j in nz:
                if other.deg[j] > room:
                    continue
                g = tuple(p + q for p, q in zip(gi, other.gammas[j]))
                out.coef[self.index[g]] += self.coef[i] * other.coef[j]
        return out

    def linear(self, const, vec) -> "_Series":
        out = self.like()
        out.coef[0] = const
        for k in range(self.n):
            e = [0] * self.n
            e[k] = 1
            if self.K >= 1:
                out.coef[self.index[tuple(e)]] = vec[k]
        return out

    def to_holo(self) -> HoloFunction:
        return HoloFunction(self.n, {g: c for g, c in zip(self.gammas, self.coef) if c != 0})

    def degree_norms(self, alpha: float) -> np.ndarray:
        nrm = np.array([monomial_norm(g, alpha) for g in self.gammas])
        out = np.zeros(self.K + 1)
        np.add.at(out, self.deg, np.abs(self.coef) ** 2 * nrm)
        return np.sqrt(out)


def _series_of(f: HoloFunction, K: int) -> _Series:
    out = _Series(f.n, K)
    for g, c in f.monomials.items():
        if sum(g) <= K:
            out.coef[out.index[g]] += c
    for a in f.atoms:
        out.coef += a.coef * _Series.atom(f.n, K, a.center, a.exponent).coef
    return out


def _transport_series(params: RepParams, x: GroupElement, f: HoloFunction, K: int) -> _Series:
    """Taylor coefficients of pi_sigma(x) f up to total degree K (exact for those degrees)."""
    n, sigma = params.n, params.sigma
    w = x.b / x.d
    dbar = np.conj(x.d)
    total = _Series(n, K)
    # monomials: z^g -> conj(d)^{-sigma-|g|} (a^* z - conj(c))^g (1 - <z,w>)^{-sigma-|g|}
    rows = np.conj(x.a).T  # row j: coefficients of (a^* z)_j
    for g, c in f.monomials.items():
        if c == 0:
            continue
        m = sum(g)
        poly = total.like()
        poly.coef[0] = 1.0
        for j, gj in enumerate(g):
            lin = total.linear(-np.conj(x.c[j]), rows[j])
            for _ in range(gj):
                poly = poly.mul(lin)
        ser = poly.mul(_Series.atom(n, K, w, sigma + m))
        total.coef += c * complex(cpow(dbar, -sigma - m)) * ser.coef
    # atoms of exponent s: conj(d)^{s-sigma} kappa^{-s} (1-<z,w>)^{s-sigma} (1-<z,u/conj(kappa)>)^{-s}
    for at in f.atoms:
        s = at.exponent
        kappa = np.conj(x.d + x.c @ at.center)
        u = x.b + x.a @ at.center
        ser = _Series.atom(n, K, u / np.conj(kappa), s)
        if s != sigma:
            ser = ser.mul(_Series.atom(n, K, w, sigma - s))
        pref = complex(cpow(dbar, s - sigma) * cpow(kappa, -s))
        total.coef += at.coef * pref * ser.coef
    return total


def _geometric_tail(norms: np.ndarray) -> float:
    """Tail estimate sum_{k>K} from the last degree norms, assuming geometric decay."""
    if norms.size < 3 or norms[-1] == 0:
        return 0.0
    ratio = norms[-1] / norms[-2] if norms[-2] > 0 else 1.0
    if ratio >= 1:
        return float("inf")
    return float(norms[-1] * ratio / (1 - ratio))


def pi_transport(params: RepParams, x: GroupElement, f: HoloFunction,
                 degree: int = TRUNCATION_DEGREE, tol: float = 1e-12):
    """Polynomial truncation of pi_sigma(x) f and a geometric tail bound for its norm."""
    ser = _transport_series(params, x, f, degree)
    norms = ser.degree_norms(params.alpha)
    tail = _geometric_tail(norms)
    if tail > tol * max(np.sqrt(np.sum(norms ** 2)), 1e-300):
        warnings.warn(TruncationWarning(
            f"re-expansion truncated at degree {degree}, tail bound {tail:.3g}", tail_bound=tail))
    return ser.to_holo(), tail


# --- wavelet transforms ------------------------------------------------------

def wavelet_psi(params: RepParams, f: HoloFunction, x):
    """W_psi f(x) = d_x^{-sigma} f(x.o); x a GroupElement or a stack of matrices."""
    X = _as_matrices(x)
    d = X[:, -1, -1]
    W = orbit_origin(X)
    out = cpow(d, -params.sigma) * np.atleast_1d(f(W))
    return complex(out[0]) if isinstance(x, GroupElement) else out


def abs_wavelet_psi(params: RepParams, f: HoloFunction, w):
    """(1 - |w|^2)^{sigma/2} |f(w)|, for a point or an (m, n) batch."""
    w = np.asarray(w, dtype=complex)
    W = np.atleast_2d(w)
    one = 1.0 - np.sum(np.abs(W) ** 2, axis=1)
    if np.any(one <= 0):
        raise DomainError("point outside the ball")
    out = one ** (params.sigma / 2) * np.abs(np.atleast_1d(f(W)))
    return float(out[0]) if w.ndim == 1 else out


def _pair_with_polynomial(ser: _Series, zeta: HoloFunction, alpha: float) -> complex:
    terms = [ser.coef[ser.index[g]] * np.conj(c) * monomial_norm(g, alpha)
             for g, c in zeta.monomials.items() if c != 0]
    return chunked_fsum(terms) if terms else 0j


def wavelet(params: RepParams, f: HoloFunction, zeta: HoloFunction, x: GroupElement,
            method: str = "adjoint", degree: int = TRUNCATION_DEGREE,
            rule: QuadratureRule | None = None) -> complex:
    """<f, pi_sigma(x) zeta> in A^2_{sigma-n-1}.

    ``adjoint`` pairs pi(x^{-1}) f with zeta; only the Taylor coefficients of
    degree <= deg(zeta) enter, so the result is exact for polynomial zeta.
    ``transport`` expands pi(x) zeta up to ``degree`` and warns with a tail
    bound.  ``quadrature`` integrates the defining inner product on ``rule``.
    Atoms of exponent sigma inside zeta are always moved exactly.
    """
    alpha = params.alpha
    zpoly = HoloFunction(zeta.n, zeta.monomials)
    zat = HoloFunction(zeta.n, {}, zeta.atoms)
    total = 0j
    if zat.atoms:
        from .bergman import inner_product_exact
        total += inner_product_exact(f, pi_apply(params, x, zat), params.sigma)
    if not zpoly.monomials:
        return total
    if method == "adjoint":
        m = max(zpoly.degree, 0)
        ser = _transport_series(params, inverse(x), f, m)
        return total + _pair_with_polynomial(ser, zpoly, alpha)
    if method == "transport":
        img, tail = pi_transport(params, x, zpoly, degree)
        fser = _series_of(f, degree)
        iser = _series_of(img, degree)
        nrm = np.array([monomial_norm(g, alpha) for g in fser.gammas])
        return total + chunked_fsum(fser.coef * np.conj(iser.coef) * nrm)
    if method == "quadrature":
        if rule is None:
            raise DomainError("quadrature method needs a rule")
        from .quadrature import fold_weight
        g = pi_apply_pointwise(params, x, zpoly, rule.nodes)
        return total + rule.integrate(f(rule.nodes) * np.conj(g) * fold_weight(rule, alpha))
    raise DomainError(f"unknown wavelet method {method!r}")


# --- integrability -----------------------------------------------------------

def lp_ball_exponent(params: RepParams, p: float, t: float) -> float:
    """Exponent of (1-|z|^2) in the ball form of the L^p_t(S) integral of W_psi psi."""
    return t + p * params.sigma / 2 - params.n - 1


def lp_membership(params: RepParams, p: float, t: float) -> bool:
    """True iff W_psi psi lies in L^p_t(S)."""
    if not 1 <= p < math.inf:
        raise DomainError("p must lie in [1, inf)")
    return lp_ball_exponent(params, p, t) > -1


def coorbit_norm(params: RepParams, f: HoloFunction, p: float, alpha: float, rule: QuadratureRule,
                 chunk: int = 1 << 15) -> float:
    """(c_alpha int_S |W_psi f(x)|^p (1-|x.o|^2)^{alpha+n+1-sigma p/2} dx)^{1/p}.

    The S-integral runs over s_z for the rule's nodes z with the invariant
    measure; the value coincides with ||f||_{A^p_alpha} for every sigma.
    """
    n = params.n
    e = alpha + n + 1 - params.sigma * p / 2
    wts = rule.weights * invariant_weight(rule)
    parts = []
    for i in range(0, rule.size, chunk):
        X = s_from_points(rule.nodes[i : i + chunk])
        om = rule.one_minus_r2[i : i + chunk]
        parts.append(math.fsum(np.abs(wavelet_psi(params, f, X)) ** p * om ** e * wts[i : i + chunk]))
    return (c_alpha(n, alpha) * math.fsum(parts)) ** (1.0 / p)


# --- convolution on S ----------------------------------------------------------

def wavelet_psi_function(params: RepParams, f: HoloFunction):
    """The function X -> W_psi f(X) on stacks of group matrices."""
    return lambda X: wavelet_psi(params, f, X)


def convolve_on_ball(F, G, x: GroupElement, rule: QuadratureRule, chunk: int = 1 << 15) -> complex:
    """(F * G)(x) = int_S F(y) G(y^{-1} x) dy, written as an integral over the ball.

    y runs over the S-elements s_z with s_z . o = z and dy = dv(z)/(1-|z|^2)^{n+1};
    the rule's Jacobi weight is divided out through ``invariant_weight``.
    """
    parts = []
    wts = rule.weights * invariant_weight(rule)
    for i in range(0, rule.size, chunk):
        Y = s_from_points(rule.nodes[i : i + chunk])
        Z = inverse_batch(Y) @ x.matrix
        with np.errstate(over="ignore", invalid="ignore"):
            vals = np.asarray(F(Y)) * np.asarray(G(Z)) * wts[i : i + chunk]
        if not np.all(np.isfinite(vals)) or np.max(np.abs(vals), initial=0) > BLOWUP_GUARD:
            raise NumericalBlowup("convolution integrand overflowed; parameters may be non-integrable")
        parts.append(chunked_fsum(vals))
    return chunked_fsum(parts)


def reproducing_constant(params: RepParams, f: HoloFunction, xs, rule: QuadratureRule,
                         tol: float = 1e-4):
    """Fit C in W_psi f * W_psi psi = C W_psi f over the sample elements.

    Returns (C, max relative residual).
    """
    X = _as_matrices(xs)
    Wf = wavelet_psi_function(params, f)
    Wpsi = wavelet_psi_function(params, psi(params.n))
    lhs = np.array([convolve_on_ball(Wf, Wpsi, GroupElement(M), rule) for M in X])
    rhs = Wf(X)
    C = float(np.real(np.vdot(rhs, lhs) / np.vdot(rhs, rhs)))
    resid = float(np.max(np.abs(lhs - C * rhs) / np.abs(C * rhs)))
    if resid > tol:
        raise ConvergenceFailure(f"reproducing identity residual {resid:.3g} exceeds {tol:g}")
    return C, resid


def reproducing_constant_closed_form(n: int, sigma: float) -> float:
    """Value the measured constant converges to with the normalisations used here."""
    return 1.0 / c_alpha(n, sigma - n - 1)


# --- Zhu's operator ------------------------------------------------------------

def zhu_bounded(a: float, b: float, t: float, p: float) -> bool:
    """Boundedness of S_{a,b} on L^p(dv_t): -p a < t + 1 < p (b + 1)."""
    return bool(-p * a < t + 1 < p * (b + 1))


def zhu_parameters(n: int, sigma: float, alpha: float, p: float):
    """(a, b, t) for which the convolution estimate reduces to Zhu's operator."""
    return sigma / 2, sigma / 2 - n - 1, alpha - sigma * p / 2


def zhu_S_apply(a: float, b: float, f, z, rule: QuadratureRule):
    """S f(z) = (1-|z|^2)^a int (1-|w|^2)^b f(w) / |1 - <z,w>|^{n+1+a+b} dv(w)."""
    z = np.asarray(z, dtype=complex)
    Z = np.atleast_2d(z)
    n = rule.n
    base = rule.one_minus_r2
    fw = np.asarray(f(rule.nodes)) * base ** (b - rule.alpha) / c_alpha(n, rule.alpha) * rule.weights
    out = np.empty(Z.shape[0], dtype=complex)
    for i, zi in enumerate(Z):
        ker = np.abs(1.0 - herm(rule.nodes, zi)) ** (-(n + 1 + a + b))
        out[i] = (1 - np.vdot(zi, zi).real) ** a * chunked_fsum(fw * ker)
    return out[0] if z.ndim == 1 else out


def _log_panels(upper: float, width: float, order: int):
    """Gauss-Legendre nodes on [0, upper] in the variable y = -log(1-s)."""
    x, w = roots_legendre(order)
    edges = np.linspace(0.0, upper, max(1, int(math.ceil(upper / width))) + 1)
    lo, hi = edges[:-1, None], edges[1:, None]
    y = ((hi - lo) * (x[None, :] + 1) / 2 + lo).ravel()
    wy = ((hi - lo) / 2 * w[None, :]).ravel()
    comp = np.exp(-y)
    return -np.expm1(-y), comp, wy * comp  # s, 1 - s, ds = e^{-y} dy


def _sphere_mean(lam: float, n: int, x, x_c=None):
    """Mean of |1 - <z, zeta>|^{-2 lam} over the unit sphere, |z|^2 = x; x_c = 1 - x."""
    x_c = 1 - x if x_c is None else x_c
    # Euler transform keeps the hypergeometric factor bounded as x -> 1
    return x_c ** (n - 2 * lam) * hyp2f1(n - lam, n - lam, n, x)


def zhu_radial_ratio(n: int, a: float, b: float, t: float, p: float, kappa: float, r: float,
                     width: float = 0.25, order: int = 20, outer: float = 60.0) -> float:
    """||S f_r|| / ||f_r|| in L^p(dv_t) for f_r = (1-|z|^2)^kappa 1{|z| < r}.

    Radial symmetry reduces both norms to one-dimensional integrals in
    s = |w|^2 and rho = |z|^2 (normalised measures, dv = n s^{n-1} ds dsigma).
    """
    lam = (n + 1 + a + b) / 2
    s, s_c, ws = _log_panels(-math.log1p(-r * r), width, order)
    rho, rho_c, wr = _log_panels(outer, width, order)
    inner_w = n * s ** (n - 1) * s_c ** (b + kappa) * ws
    Sf = np.array([
        qc ** a * math.fsum(inner_w * _sphere_mean(lam, n, q * s, qc + q * s_c)) for q, qc in zip(rho, rho_c)
    ])
    num = math.fsum(n * rho ** (n - 1) * rho_c ** t * np.abs(Sf) ** p * wr)
    den = math.fsum(n * s ** (n - 1) * s_c ** (t + p * kappa) * ws)
    return (num / den) ** (1 / p)


def zhu_extremal_exponent(b: float, t: float, p: float) -> float:
    """Radial exponent of the test family that saturates the upper boundedness condition."""
    q = p / (p - 1) if p > 1 else math.inf
    if math.isinf(q):
        return b
    return (b - t / p) * (q - 1) - t / p


def zhu_norm_sweep(n: int, sigma: float, alpha: float, p: float, gaps) -> np.ndarray:
    """Empirical ||S f_r|| / ||f_r|| for 1 - r^2 in ``gaps``."""
    a, b, t = zhu_parameters(n, sigma, alpha, p)
    kappa = zhu_extremal_exponent(b, t, p)
    return np.array([zhu_radial_ratio(n, a, b, t, p, kappa, math.sqrt(1 - g)) for g in gaps])


# --- smooth-vector envelope -----------------------------------------------------

def log_envelope_check(params: RepParams, zeta: HoloFunction, phis, xs) -> float:
    """max |W_zeta(phi)(x)| / [(1-|x.o|^2)^{sigma/2} (1 - log(1-|x.o|^2))]."""
    X = _as_matrices(xs)
    if isinstance(phis, HoloFunction):
        phis = [phis]
    W = orbit_origin(X)
    one = 1.0 - np.sum(np.abs(W) ** 2, axis=1)
    env = one ** (params.sigma / 2) * (1.0 - np.log(one))
    best = 0.0
    for phi in phis:
        for M, e in zip(X, env):
            val = wavelet(params, phi, zeta, GroupElement(M))
            best = max(best, abs(val) / e)
    return best
