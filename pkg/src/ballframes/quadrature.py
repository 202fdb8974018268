"""Product quadrature for dv_alpha on the unit ball of C^n.

With t = |z|^2, the moduli s_k = |z_k|^2 / t and the phases theta_k, the
probability measure dv_alpha factors as

    (1-t)^alpha t^(n-1) dt  x  uniform(simplex)  x  uniform(torus^n).

t is handled by Gauss-Jacobi, the simplex by stick-breaking with one
Gauss-Jacobi rule per stage, the phases by uniform grids.  A rule with
R radial, L simplex and M phase nodes integrates z^gamma conj(z)^delta exactly
for |gamma|, |delta| <= min(M - 1, 2R - 1, 2L - 1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_jacobi

from .bergman import c_alpha, monomial_norm, monomials_eval, multi_indices_upto, _check_alpha
from .errors import ConvergenceFailure

TAU_QUAD = 1e-9
CHUNK = 1 << 16


def fsum_complex(values) -> complex:
    v = np.asarray(values, dtype=complex).ravel()
    return complex(math.fsum(v.real), math.fsum(v.imag))


def chunked_fsum(values, chunk: int = CHUNK) -> complex:
    """Compensated sum over fixed-size chunks, then over the partial sums.

    The chunk layout depends only on ``chunk``, so the result does not depend
    on how chunks are scheduled.
    """
    v = np.asarray(values, dtype=complex).ravel()
    partials = [fsum_complex(v[i : i + chunk]) for i in range(0, v.size, chunk)]
    return fsum_complex(partials)


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    alpha: float
    exactness_degree: int
    orders: tuple = ()  # (R, M, L) for product rules

    @property
    def n(self) -> int:
        return self.nodes.shape[1]

    @property
    def size(self) -> int:
        return self.weights.shape[0]

    @property
    def one_minus_r2(self) -> np.ndarray:
        return 1.0 - np.sum(np.abs(self.nodes) ** 2, axis=1)

    def integrate(self, values, chunk: int = CHUNK) -> complex:
        """Integral of the sampled values against dv_alpha."""
        v = np.asarray(values)
        return chunked_fsum(v * self.weights, chunk)

    def integrate_real(self, values, chunk: int = CHUNK) -> float:
        return self.integrate(values, chunk).real


def _jacobi_unit(order: int, a: float, b: float):
    """Nodes/weights on [0,1] for weight (1-t)^a t^b, normalised to total mass 1."""
    x, w = roots_jacobi(order, a, b)
    w = w / w.sum()
    return (1.0 + x) / 2.0, w


def ball_quadrature(n: int, alpha: float, R: int, M: int, L: int | None = None,
                    certify: bool = True) -> QuadratureRule:
    """Product rule for dv_alpha; see the module docstring for the layout."""
    _check_alpha(alpha)
    L = R if L is None else L
    t, wt = _jacobi_unit(R, alpha, n - 1)
    # simplex points (s_1..s_n) via stick breaking
    S = np.ones((1, n))
    ws = np.ones(1)
    remaining = np.ones(1)
    for k in range(1, n):
        u, wu = _jacobi_unit(L, n - 1 - k, 0.0)
        newS = []
        for j in range(n):
            newS.append(np.repeat(S[:, j], len(u)))
        newS = np.stack(newS, axis=1)
        rem = np.repeat(remaining, len(u))
        uu = np.tile(u, len(remaining))
        newS[:, k - 1] = rem * uu
        remaining = rem * (1 - uu)
        newS[:, k:] = 0.0
        S = newS
        ws = np.repeat(ws, len(u)) * np.tile(wu, len(ws))
    S[:, n - 1] = remaining
    phases = np.array(list(np.ndindex(*(M,) * n)), dtype=float).reshape(-1, n) * (2 * np.pi / M)
    wp = np.full(phases.shape[0], 1.0 / phases.shape[0])
    # assemble: radial x simplex x phase
    mod = np.sqrt(t[:, None, None] * S[None, :, :])  # (R, nS, n)
    nodes = mod[:, :, None, :] * np.exp(1j * phases)[None, None, :, :]
    weights = wt[:, None, None] * ws[None, :, None] * wp[None, None, :]
    nodes = nodes.reshape(-1, n)
    weights = weights.reshape(-1)
    D = min(M - 1, 2 * R - 1, 2 * L - 1 if n > 1 else 10**9)
    rule = QuadratureRule(nodes, weights, float(alpha), int(D), (R, M, L))
    if certify:
        certify_exactness(rule, full=False)
    return rule


def rule_for_degree(n: int, alpha: float, D: int, **kw) -> QuadratureRule:
    """Smallest product rule with exactness degree >= D."""
    R = (D + 2) // 2
    return ball_quadrature(n, alpha, R, D + 1, R, **kw)


def certify_exactness(rule: QuadratureRule, full: bool = True, tol: float = TAU_QUAD) -> float:
    """Check the rule against closed-form monomial norms up to its degree.

    ``full`` tests every pair |gamma|, |delta| <= D (diagonal against the
    closed form, off-diagonal against zero); otherwise only the extreme
    monomials are tested.  Returns the largest relative error.
    """
    n, D = rule.n, rule.exactness_degree
    if full:
        gammas = list(multi_indices_upto(n, D))
    else:
        gammas = [(0,) * n]
        for j in range(n):
            g = [0] * n
            g[j] = D
            gammas.append(tuple(g))
    P = monomials_eval(rule.nodes, gammas)
    gram = (P * rule.weights[:, None]).T @ np.conj(P)
    exact = np.diag([monomial_norm(g, rule.alpha) for g in gammas])
    scale = np.sqrt(np.outer(np.diag(exact), np.diag(exact)))
    err = float(np.max(np.abs(gram - exact) / scale))
    if not err <= tol:
        raise ConvergenceFailure(f"quadrature rule is not exact to degree {D}: rel. error {err:.3g}")
    return err


def fold_weight(rule: QuadratureRule, alpha: float) -> np.ndarray:
    """Factor turning integration against rule.alpha into integration against dv_alpha."""
    _check_alpha(alpha)
    if alpha == rule.alpha:
        return np.ones(rule.size)
    return c_alpha(rule.n, alpha) / c_alpha(rule.n, rule.alpha) * rule.one_minus_r2 ** (alpha - rule.alpha)


def invariant_weight(rule: QuadratureRule) -> np.ndarray:
    """Factor turning rule integration into dv/(1-|z|^2)^{n+1}, the S-invariant measure."""
    n = rule.n
    return rule.one_minus_r2 ** (-(n + 1) - rule.alpha) / c_alpha(n, rule.alpha)


def lp_alpha_norm(f, p: float, alpha: float, rule: QuadratureRule) -> float:
    """(int |f|^p dv_alpha)^{1/p} by quadrature."""
    vals = np.abs(f(rule.nodes)) ** p * fold_weight(rule, alpha)
    return rule.integrate_real(vals) ** (1.0 / p)


def group_norm_equiv_check(f, p: float, alpha: float, rule: QuadratureRule) -> float:
    """Relative gap between ||f||^p_{L^p_alpha} and c_alpha ||f~||^p on S.

    The group side integrates f~(x) = f(x.o) with weight (1-|x.o|^2)^{alpha+n+1}
    against the invariant measure, over the S-elements s_z with s_z . o = z, using
    a second rule whose Jacobi weight differs from alpha by an integer.
    """
    from .group import orbit_origin, s_from_points

    n = rule.n
    R, M, L = rule.orders or ((rule.exactness_degree + 2) // 2, rule.exactness_degree + 1, None)
    # both sides on rules whose Jacobi weight matches the integrand up to integer powers
    rule1 = rule if rule.alpha == alpha else ball_quadrature(n, alpha, R, M, L, certify=False)
    lhs = lp_alpha_norm(f, p, alpha, rule1) ** p
    alpha2 = alpha - math.floor(alpha) if alpha >= 0 else alpha
    rule2 = ball_quadrature(n, alpha2, R + 2, M + 2, L and L + 2, certify=False)
    X = s_from_points(rule2.nodes)
    W = orbit_origin(X)
    one = 1.0 - np.sum(np.abs(W) ** 2, axis=1)
    vals = np.abs(f(W)) ** p * one ** (alpha + n + 1) * invariant_weight(rule2)
    rhs = c_alpha(n, alpha) * rule2.integrate_real(vals)
    return abs(lhs - rhs) / abs(lhs)


def reproduce_check(f, z, sigma: float, rule: QuadratureRule) -> float:
    """|int f(w) K_{sigma-n-1}(z, w) dv_{sigma-n-1}(w) - f(z)|."""
    from .bergman import kernel_eval

    n = rule.n
    alpha = sigma - n - 1
    z = np.asarray(z, dtype=complex)
    vals = f(rule.nodes) * kernel_eval(z[None, :], rule.nodes, alpha) * fold_weight(rule, alpha)
    return abs(rule.integrate(vals) - complex(np.asarray(f(z[None, :])).ravel()[0]))
