"""Reference values computed independently of the package internals.

The oracles use mpmath, scipy.integrate and dense numpy linear algebra
rather than the closed forms implemented in ballframes.
"""
import math

import mpmath as mp
import numpy as np
from scipy import integrate


def monomial_norm_integral(gamma, alpha):
    """||z^gamma||^2 in A^2_alpha by iterated 1-D integration.

    In polar form |z_k|^2 = t s_k with s on the simplex; the probability
    measure dv_alpha factors as Beta(n, alpha+1) in t times the uniform
    simplex density (n-1)! ds.
    """
    n = len(gamma)
    k = sum(gamma)
    radial = integrate.quad(lambda t: t ** (n - 1 + k) * (1 - t) ** alpha, 0, 1)[0]
    radial /= integrate.quad(lambda t: t ** (n - 1) * (1 - t) ** alpha, 0, 1)[0]
    # simplex moment of prod s_j^gamma_j under the uniform density, via mpmath
    simplex = mp.factorial(n - 1) * mp.fprod(mp.factorial(g) for g in gamma) / mp.factorial(n - 1 + k)
    return radial * float(simplex)


def kernel_series(z, w, alpha, terms=400):
    """(1 - <z,w>)^{-(n+1+alpha)} summed as a binomial series in mpmath."""
    n = len(z)
    u = mp.mpc(complex(np.sum(np.asarray(z) * np.conj(np.asarray(w)))))
    s = n + 1 + alpha
    return complex(mp.nsum(lambda k: mp.rf(s, k) / mp.factorial(k) * u ** k, [0, terms]))


def matrix_inverse(M):
    return np.linalg.inv(M)


def su_n1_random(n, rng):
    """An element of SU(n,1) from exponentiating a random element of su(n,1)."""
    from scipy.linalg import expm

    J = np.diag([-1.0] * n + [1.0])
    A = rng.standard_normal((n + 1, n + 1)) + 1j * rng.standard_normal((n + 1, n + 1))
    # X in su(n,1) iff X^* J + J X = 0 and tr X = 0
    X = 0.5 * (A - J @ A.conj().T @ J)
    X -= np.trace(X) / (n + 1) * np.eye(n + 1)
    return expm(0.5 * X)


def reproducing_constant_integral(n, sigma):
    """int (1-|z|^2)^{sigma-n-1} dv for the normalised volume, by quadrature in t = |z|^2."""
    return n * integrate.quad(lambda t: t ** (n - 1) * (1 - t) ** (sigma - n - 1), 0, 1)[0]


def sphere_mean_n1(lam, r2):
    """(1/2pi) int |1 - r e^{i theta}|^{-2 lam} d theta."""
    r = math.sqrt(r2)
    f = lambda th: abs(1 - r * complex(math.cos(th), math.sin(th))) ** (-2 * lam)
    return integrate.quad(f, 0, 2 * math.pi, limit=400)[0] / (2 * math.pi)


def rho_disc(z, w):
    """Pseudo-hyperbolic distance in the unit disc via the Moebius map."""
    return abs(z - w) / abs(1 - np.conj(w) * z)
