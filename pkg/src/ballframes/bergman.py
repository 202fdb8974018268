"""Weighted Bergman spaces A^2_alpha on the unit ball of C^n.

Norms of monomials, the orthonormal basis phi_gamma, reproducing kernels,
homogeneous expansions and exact inner products for functions that are finite
sums of monomials z^gamma and kernel atoms (1 - <z, w>)^{-s}.

All Gamma-ratios are evaluated through ``gammaln``; Gamma(n + alpha + 1 + k)
overflows a double near k = 170.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, UnsupportedAtomExponent
from .group import herm

MultiIndex = tuple


# --- multi-indices -----------------------------------------------------------

@lru_cache(maxsize=None)
def multi_indices(n: int, k: int) -> tuple:
    """All gamma in Z_+^n with |gamma| = k, in lexicographically decreasing order."""
    if n == 1:
        return ((k,),)
    out = []
    for first in range(k, -1, -1):
        for rest in multi_indices(n - 1, k - first):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def multi_indices_upto(n: int, K: int) -> tuple:
    return tuple(g for k in range(K + 1) for g in multi_indices(n, k))


def log_factorial(gamma) -> float:
    return float(sum(gammaln(g + 1.0) for g in gamma))


def _check_alpha(alpha):
    if not alpha > -1:
        raise DomainError(f"alpha must exceed -1, got {alpha}")


def c_alpha(n: int, alpha: float) -> float:
    """Normalising constant of dv_alpha = c_alpha (1-|z|^2)^alpha dv."""
    _check_alpha(alpha)
    return math.exp(gammaln(n + alpha + 1) - gammaln(n + 1) - gammaln(alpha + 1))


def log_monomial_norm(gamma, alpha: float) -> float:
    _check_alpha(alpha)
    n = len(gamma)
    k = sum(gamma)
    return log_factorial(gamma) + gammaln(n + alpha + 1) - gammaln(n + alpha + 1 + k)


def monomial_norm(gamma, alpha: float) -> float:
    """||z^gamma||^2 in A^2_alpha."""
    return math.exp(log_monomial_norm(tuple(gamma), alpha))


def monomials_eval(Z: np.ndarray, gammas) -> np.ndarray:
    """Matrix [z_i^gamma_j] for points Z (m, n)."""
    Z = np.atleast_2d(np.asarray(Z, dtype=complex))
    G = np.asarray(gammas, dtype=int).reshape(len(gammas), Z.shape[1])
    out = np.ones((Z.shape[0], G.shape[0]), dtype=complex)
    for k in range(Z.shape[1]):
        kmax = int(G[:, k].max()) if len(G) else 0
        powers = Z[:, k : k + 1] ** np.arange(kmax + 1)
        out *= powers[:, G[:, k]]
    return out


def phi_normalizer(gamma, alpha: float) -> float:
    return math.exp(-0.5 * log_monomial_norm(tuple(gamma), alpha))


def phi_gamma_eval(gamma, alpha: float, z) -> complex:
    """Orthonormal basis function phi_gamma of A^2_alpha at z."""
    z = np.asarray(z, dtype=complex)
    val = monomials_eval(np.atleast_2d(z), [tuple(gamma)])[:, 0] * phi_normalizer(gamma, alpha)
    return val[0] if z.ndim == 1 else val


# --- kernels -----------------------------------------------------------------

def cpow(base, s):
    """Principal-branch base**s for complex base."""
    return np.power(np.asarray(base, dtype=complex), s)


def kernel_eval(z, w, alpha: float):
    """K_alpha(z, w) = (1 - <z, w>)^{-(n+1+alpha)}."""
    z = np.asarray(z, dtype=complex)
    n = z.shape[-1]
    return cpow(1.0 - herm(z, w), -(n + 1 + alpha))


def kernel_partial_sum(z, w, alpha: float, K: int):
    """sum_{|gamma| <= K} phi_gamma(z) conj(phi_gamma(w))."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    n = z.shape[-1]
    gammas = multi_indices_upto(n, K)
    scale = np.array([math.exp(-log_monomial_norm(g, alpha)) for g in gammas])
    Pz = monomials_eval(np.atleast_2d(z), gammas)
    Pw = monomials_eval(np.atleast_2d(w), gammas)
    out = np.sum(Pz * np.conj(Pw) * scale, axis=-1)
    return out[0] if z.ndim == 1 and w.ndim == 1 else out


# --- sphere ------------------------------------------------------------------

def dim_Pk(n: int, k: int) -> int:
    d = math.comb(k + n - 1, k)
    assert d <= (1 + k) ** n
    return d


def sphere_monomial_norm(gamma) -> float:
    """||z^gamma||^2 in L^2 of the normalised sphere measure."""
    n, k = len(gamma), sum(gamma)
    return math.exp(log_factorial(gamma) + gammaln(n) - gammaln(n + k))


def sphere_kernel_Hk(z, w, k: int):
    """Reproducing kernel of the degree-k homogeneous polynomials in L^2(sphere)."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    n = z.shape[-1]
    gammas = multi_indices(n, k)
    coef = np.array([math.exp(gammaln(n + k) - gammaln(n) - log_factorial(g)) for g in gammas])
    out = np.sum(
        monomials_eval(np.atleast_2d(z), gammas) * np.conj(monomials_eval(np.atleast_2d(w), gammas)) * coef,
        axis=-1,
    )
    return out[0] if z.ndim == 1 and w.ndim == 1 else out


def sphere_to_bergman_norm_factor(k: int, sigma: float, n: int) -> float:
    """||p||^2_{V_sigma} / ||p||^2_{L^2(sphere)} for p homogeneous of degree k."""
    if not sigma > n:
        raise DomainError(f"need sigma > n, got sigma={sigma}, n={n}")
    return math.exp(gammaln(n + k) + gammaln(sigma) - gammaln(n) - gammaln(sigma + k))


# --- holomorphic functions ---------------------------------------------------

@dataclass(frozen=True, eq=False)
class Atom:
    coef: complex
    center: np.ndarray
    exponent: float

    def key(self):
        return (self.center.tobytes(), float(self.exponent))


@dataclass(eq=False)
class HoloFunction:
    """Finite sum of monomials and kernel atoms on the ball of C^n.

    ``monomials`` maps a multi-index to its coefficient; ``atoms`` lists
    terms coef * (1 - <z, center>)^{-exponent}.
    """

    n: int
    monomials: dict = field(default_factory=dict)
    atoms: list = field(default_factory=list)

    def __post_init__(self):
        mons = {}
        for g, c in self.monomials.items():
            g = tuple(int(x) for x in g)
            if len(g) != self.n or min(g, default=0) < 0:
                raise DomainError(f"bad multi-index {g} for n={self.n}")
            mons[g] = mons.get(g, 0) + complex(c)
        self.monomials = mons
        merged = {}
        for a in self.atoms:
            center = np.asarray(a.center, dtype=complex).reshape(self.n)
            if np.vdot(center, center).real >= 1.0:
                raise DomainError("atom centre must lie inside the ball")
            if not a.exponent > 0:
                raise DomainError("atom exponent must be positive")
            a = Atom(complex(a.coef), center, float(a.exponent))
            if a.key() in merged:
                old = merged[a.key()]
                a = Atom(old.coef + a.coef, center, a.exponent)
            merged[a.key()] = a
        self.atoms = list(merged.values())

    # constructors
    @classmethod
    def zero(cls, n):
        return cls(n)

    @classmethod
    def constant(cls, n, value=1.0):
        return cls(n, {(0,) * n: value})

    @classmethod
    def monomial(cls, gamma, coef=1.0):
        gamma = tuple(gamma)
        return cls(len(gamma), {gamma: coef})

    @classmethod
    def atom(cls, center, exponent, coef=1.0):
        center = np.atleast_1d(np.asarray(center, dtype=complex))
        return cls(center.shape[0], {}, [Atom(coef, center, exponent)])

    @classmethod
    def polynomial(cls, coeffs: dict, n=None):
        if n is None:
            n = len(next(iter(coeffs)))
        return cls(n, dict(coeffs))

    # algebra
    def __add__(self, other):
        if not isinstance(other, HoloFunction):
            return NotImplemented
        if other.n != self.n:
            raise DomainError("dimension mismatch")
        mons = dict(self.monomials)
        for g, c in other.monomials.items():
            mons[g] = mons.get(g, 0) + c
        return HoloFunction(self.n, mons, self.atoms + other.atoms)

    def scale(self, c):
        c = complex(c)
        return HoloFunction(
            self.n,
            {g: c * v for g, v in self.monomials.items()},
            [Atom(c * a.coef, a.center, a.exponent) for a in self.atoms],
        )

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    # queries
    @property
    def is_polynomial(self) -> bool:
        return not self.atoms

    @property
    def degree(self) -> int:
        """Degree of the monomial part (-1 if there is none)."""
        return max((sum(g) for g, c in self.monomials.items() if c != 0), default=-1)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        Z = np.atleast_2d(z)
        out = np.zeros(Z.shape[0], dtype=complex)
        if self.monomials:
            gammas = list(self.monomials)
            coefs = np.array([self.monomials[g] for g in gammas])
            out += monomials_eval(Z, gammas) @ coefs
        for a in self.atoms:
            out += a.coef * cpow(1.0 - herm(Z, a.center), -a.exponent)
        return out[0] if z.ndim == 1 else out

    def __repr__(self):
        return f"HoloFunction(n={self.n}, monomials={len(self.monomials)}, atoms={len(self.atoms)})"


def psi(n: int) -> HoloFunction:
    """The constant function 1, the distinguished vector of the representation."""
    return HoloFunction.constant(n, 1.0)


def atom_series_coefficient(gamma, w, s) -> complex:
    """Coefficient of z^gamma in (1 - <z, w>)^{-s}."""
    k = sum(gamma)
    logc = gammaln(s + k) - gammaln(s) - log_factorial(gamma)
    wg = np.prod(np.conj(np.asarray(w, dtype=complex)) ** np.asarray(gamma))
    return math.exp(logc) * wg


def homogeneous_parts(f: HoloFunction, k_max: int) -> list:
    """Degree-k parts of f for k = 0..k_max, each as a pure polynomial."""
    parts = [dict() for _ in range(k_max + 1)]
    for g, c in f.monomials.items():
        k = sum(g)
        if k <= k_max and c != 0:
            parts[k][g] = parts[k].get(g, 0) + c
    for a in f.atoms:
        for k in range(k_max + 1):
            for g in multi_indices(f.n, k):
                v = a.coef * atom_series_coefficient(g, a.center, a.exponent)
                if v != 0:
                    parts[k][g] = parts[k].get(g, 0) + v
    return [HoloFunction(f.n, p) for p in parts]


def poly_norm2(f: HoloFunction, alpha: float) -> float:
    """||f||^2 in A^2_alpha for a polynomial f."""
    if not f.is_polynomial:
        raise DomainError("poly_norm2 needs a polynomial")
    return math.fsum(abs(c) ** 2 * monomial_norm(g, alpha) for g, c in f.monomials.items())


def smooth_decay_check(parts, sigma: float, N: float, rtol: float = 1e-12):
    """Test ||part_k||_{V_sigma} <= C (1+k)^{-N} on the available degrees.

    The envelope constant is fitted on the lower half of the degrees and must
    bound the upper half; a smooth vector passes once k_max is large enough.
    Returns (holds, C) with C the smallest constant valid for every degree.
    """
    if not parts:
        return True, 0.0
    n = parts[0].n
    alpha = sigma - n - 1
    k_max = len(parts) - 1
    env = np.array([
        math.sqrt(poly_norm2(p, alpha)) * (1.0 + k) ** N for k, p in enumerate(parts)
    ])
    C = float(env.max())
    C_low = float(env[: k_max // 2 + 1].max())
    holds = bool(np.all(env <= C_low * (1 + rtol)))
    return holds, C


# --- inner products ----------------------------------------------------------

def _atom_pair(a1: Atom, a2: Atom, n: int, alpha: float, tol: float = 1e-17, kmax: int = 100000):
    """<atom1, atom2> in A^2_alpha via the degree-wise series."""
    u = herm(a2.center, a1.center)
    s1, s2 = a1.exponent, a2.exponent
    if abs(s1 - n - 1 - alpha) < 1e-15 and abs(s2 - s1) < 1e-15:
        return a1.coef * np.conj(a2.coef) * complex(cpow(1.0 - u, -s1))
    total = 0j
    base = gammaln(n + alpha + 1) - gammaln(s1) - gammaln(s2)
    uk = 1.0 + 0j
    for k in range(kmax):
        logt = base + gammaln(s1 + k) + gammaln(s2 + k) - gammaln(k + 1) - gammaln(n + alpha + 1 + k)
        term = math.exp(logt) * uk
        total += term
        if k > 2 and abs(term) < tol * max(abs(total), 1e-300):
            break
        uk *= u
    return a1.coef * np.conj(a2.coef) * total


def inner_product(f: HoloFunction, g: HoloFunction, alpha: float) -> complex:
    """<f, g> in A^2_alpha.

    Monomial pairs and monomial/atom pairs are exact finite expressions; atom
    pairs use the closed kernel form when both exponents equal n+1+alpha and a
    convergent series otherwise.
    """
    _check_alpha(alpha)
    n = f.n
    total = []
    for gm, c in f.monomials.items():
        if gm in g.monomials:
            total.append(c * np.conj(g.monomials[gm]) * monomial_norm(gm, alpha))
    for gm, c in f.monomials.items():
        nm = monomial_norm(gm, alpha)
        for a in g.atoms:
            total.append(c * np.conj(a.coef * atom_series_coefficient(gm, a.center, a.exponent)) * nm)
    for gm, c in g.monomials.items():
        nm = monomial_norm(gm, alpha)
        for a in f.atoms:
            total.append(a.coef * atom_series_coefficient(gm, a.center, a.exponent) * np.conj(c) * nm)
    for a1 in f.atoms:
        for a2 in g.atoms:
            total.append(_atom_pair(a1, a2, n, alpha))
    return complex(math.fsum(v.real for v in total), math.fsum(v.imag for v in total)) if total else 0j


def inner_product_exact(f: HoloFunction, g: HoloFunction, sigma: float) -> complex:
    """<f, g> in V_sigma = A^2_{sigma-n-1}, using only closed forms.

    Atoms must have exponent sigma (multiples of kernel sections), so the
    reproducing property evaluates every pairing exactly.
    """
    n = f.n
    if not sigma > n:
        raise DomainError(f"need sigma > n, got {sigma}")
    alpha = sigma - n - 1
    for a in f.atoms + g.atoms:
        if a.exponent != sigma:
            raise UnsupportedAtomExponent(
                f"atom exponent {a.exponent} != sigma={sigma}; use a quadrature pairing"
            )
    total = []
    for gm, c in f.monomials.items():
        if gm in g.monomials:
            total.append(c * np.conj(g.monomials[gm]) * monomial_norm(gm, alpha))
    fm = HoloFunction(n, f.monomials)
    gm_ = HoloFunction(n, g.monomials)
    for a in g.atoms:  # <f_mono, c K_w> = conj(c) f_mono(w)
        if fm.monomials:
            total.append(np.conj(a.coef) * fm(a.center))
    for a in f.atoms:  # <c K_w, g_mono> = c conj(g_mono(w))
        if gm_.monomials:
            total.append(a.coef * np.conj(gm_(a.center)))
    for a1 in f.atoms:
        for a2 in g.atoms:  # <K_w1, K_w2> = K(w2, w1)
            total.append(a1.coef * np.conj(a2.coef) * complex(cpow(1.0 - herm(a2.center, a1.center), -sigma)))
    return complex(math.fsum(v.real for v in total), math.fsum(v.imag for v in total)) if total else 0j


def onb_coefficients(f: HoloFunction, alpha: float, K: int) -> np.ndarray:
    """Coordinates <f, phi_gamma> for |gamma| <= K (order of multi_indices_upto)."""
    gammas = multi_indices_upto(f.n, K)
    out = np.zeros(len(gammas), dtype=complex)
    for j, g in enumerate(gammas):
        c = f.monomials.get(g, 0)
        for a in f.atoms:
            c += a.coef * atom_series_coefficient(g, a.center, a.exponent)
        out[j] = c * math.exp(0.5 * log_monomial_norm(g, alpha))
    return out


def from_onb_coefficients(beta, n: int, alpha: float, K: int) -> HoloFunction:
    gammas = multi_indices_upto(n, K)
    return HoloFunction(n, {g: b * phi_normalizer(g, alpha) for g, b in zip(gammas, beta) if b != 0})
