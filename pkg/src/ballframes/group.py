"""SU(n,1) in block form, its action on the unit ball of C^n, and the solvable
subgroup S = AN which acts simply transitively on the ball.

A group element is stored as its dense (n+1)x(n+1) complex matrix

    x = [[a,   b],
         [c^t, d]]

and acts by z -> (a z + b) / (c.z + d).  Everything here is a pure function of
its inputs.  Batched variants (``*_batch``, ``s_from_points``) work on stacks of
matrices with shape (m, n+1, n+1) and point arrays with shape (m, n).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailure, DomainError, InvalidGroupElement, NumericalDegeneracy

TAU_GRP = 1e-10
TAU_PT = 1e-10
TAU_DEN = 1e-14


def J_matrix(n: int) -> np.ndarray:
    return np.diag(np.r_[-np.ones(n), 1.0]).astype(complex)


def herm(z, w):
    """<z, w> = sum z_k conj(w_k), broadcasting over leading axes."""
    return np.sum(np.asarray(z) * np.conj(np.asarray(w)), axis=-1)


def as_coords(z) -> np.ndarray:
    if isinstance(z, BallPoint):
        return z.coords
    return np.asarray(z, dtype=complex)


@dataclass(frozen=True, eq=False)
class BallPoint:
    """A point of the open unit ball in C^n."""

    coords: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coords, dtype=complex))
        if c.ndim != 1:
            raise DomainError("BallPoint needs a 1-d coordinate vector")
        if not np.all(np.isfinite(c)) or np.vdot(c, c).real >= 1.0:
            raise DomainError(f"point {c} is not inside the open unit ball")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.coords, self.coords).real)

    @classmethod
    def origin(cls, n: int) -> "BallPoint":
        return cls(np.zeros(n, dtype=complex))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype)

    def __repr__(self):
        return f"BallPoint({np.array2string(self.coords, precision=6)})"


@dataclass(frozen=True, eq=False)
class GroupElement:
    """An element of SU(n,1).  Use :func:`make_group_element` for validated construction."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 2:
            raise InvalidGroupElement(f"bad matrix shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0] - 1

    @property
    def a(self) -> np.ndarray:
        return self.matrix[: self.n, : self.n]

    @property
    def b(self) -> np.ndarray:
        return self.matrix[: self.n, self.n]

    @property
    def c(self) -> np.ndarray:
        return self.matrix[self.n, : self.n]

    @property
    def d(self) -> complex:
        return complex(self.matrix[self.n, self.n])

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return multiply(self, other)

    def defect(self) -> dict:
        """Residuals of the three defining relations."""
        J = J_matrix(self.n)
        x = self.matrix
        return {
            "form": float(np.max(np.abs(x.conj().T @ J @ x - J))),
            "det": float(abs(np.linalg.det(x) - 1.0)),
            "d_b": float(abs(abs(self.d) ** 2 - np.vdot(self.b, self.b).real - 1.0)),
        }

    def validate(self, tol: float = TAU_GRP) -> "GroupElement":
        bad = {k: v for k, v in self.defect().items() if not v <= tol}
        if bad:
            raise InvalidGroupElement(f"not in SU({self.n},1): residuals {bad}")
        return self

    def __repr__(self):
        return f"GroupElement(n={self.n}, d={self.d:.6g})"


def make_group_element(a, b, c, d, tol: float = TAU_GRP) -> GroupElement:
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    n = a.shape[0]
    b = np.asarray(b, dtype=complex).reshape(-1)
    c = np.asarray(c, dtype=complex).reshape(-1)
    if a.shape != (n, n) or b.shape != (n,) or c.shape != (n,):
        raise InvalidGroupElement(
            f"inconsistent block shapes a{a.shape} b{b.shape} c{c.shape}"
        )
    m = np.empty((n + 1, n + 1), dtype=complex)
    m[:n, :n] = a
    m[:n, n] = b
    m[n, :n] = c
    m[n, n] = d
    return GroupElement(m).validate(tol)


def identity(n: int) -> GroupElement:
    return GroupElement(np.eye(n + 1, dtype=complex))


def inverse(x: GroupElement) -> GroupElement:
    """x^{-1} = J x^* J, i.e. blocks (a^*, -conj(c), -conj(b)^t, conj(d))."""
    n = x.n
    m = np.empty_like(x.matrix)
    m[:n, :n] = x.a.conj().T
    m[:n, n] = -np.conj(x.c)
    m[n, :n] = -np.conj(x.b)
    m[n, n] = np.conj(x.d)
    return GroupElement(m)


def multiply(x: GroupElement, y: GroupElement) -> GroupElement:
    return GroupElement(x.matrix @ y.matrix)


def _guard_ball(z: np.ndarray) -> np.ndarray:
    r2 = np.sum(np.abs(z) ** 2, axis=-1)
    if np.any(~np.isfinite(r2)) or np.any(r2 >= (1.0 + TAU_PT) ** 2):
        raise NumericalDegeneracy("image left the unit ball")
    over = r2 >= 1.0
    if np.any(over):
        z = np.array(z, copy=True)
        scale = (1.0 - 1e-16) / np.sqrt(r2[over])
        z[over] = z[over] * scale[..., None]
    return z


def act(x: GroupElement, z) -> BallPoint:
    """Fractional-linear action x . z."""
    zc = as_coords(z)
    den = x.c @ zc + x.d
    if abs(den) < TAU_DEN:
        raise NumericalDegeneracy(f"|c.z + d| = {abs(den):.3g}")
    return BallPoint(_guard_ball((x.a @ zc + x.b) / den))


def act_batch(X: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """Apply matrices X (m, n+1, n+1) (or one matrix) to points Z (m, n)."""
    X = np.asarray(X)
    Z = np.asarray(Z, dtype=complex)
    n = Z.shape[-1]
    a, b = X[..., :n, :n], X[..., :n, n]
    c, d = X[..., n, :n], X[..., n, n]
    num = np.einsum("...ij,...j->...i", a, Z) + b
    den = np.einsum("...j,...j->...", c, Z) + d
    if np.any(np.abs(den) < TAU_DEN):
        raise NumericalDegeneracy("|c.z + d| below threshold")
    return _guard_ball(num / den[..., None])


def orbit_origin(X: np.ndarray) -> np.ndarray:
    """x . o = b / d for a stack of matrices."""
    X = np.asarray(X)
    n = X.shape[-1] - 1
    return X[..., :n, n] / X[..., n, n][..., None]


def inverse_batch(X: np.ndarray) -> np.ndarray:
    n = X.shape[-1] - 1
    J = np.r_[-np.ones(n), 1.0]
    return J[:, None] * np.conj(np.swapaxes(X, -1, -2)) * J[None, :]


def d_component(x: GroupElement) -> complex:
    return x.d


def cocycle_check(y: GroupElement, x: GroupElement) -> float:
    """|d_{y^-1 x} - conj(d_y) d_x (1 - <w, z>)| with w = x.o, z = y.o."""
    w = x.b / x.d
    z = y.b / y.d
    lhs = multiply(inverse(y), x).d
    rhs = np.conj(y.d) * x.d * (1.0 - herm(w, z))
    return float(abs(lhs - rhs))


# --- subgroups ---------------------------------------------------------------

def a_element(t: float, n: int) -> GroupElement:
    m = np.eye(n + 1, dtype=complex)
    m[0, 0] = m[n, n] = np.cosh(t)
    m[0, n] = m[n, 0] = np.sinh(t)
    return GroupElement(m)


def _a_matrices(t: np.ndarray, n: int) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    m = np.zeros(t.shape + (n + 1, n + 1), dtype=complex)
    idx = np.arange(1, n)
    m[..., idx, idx] = 1.0
    m[..., 0, 0] = m[..., n, n] = np.cosh(t)
    m[..., 0, n] = m[..., n, 0] = np.sinh(t)
    return m


def _n_matrices(zeta: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Stack of n_{zeta,u}; zeta has shape (..., n-1)."""
    zeta = np.asarray(zeta, dtype=complex)
    u = np.asarray(u, dtype=float)
    n = zeta.shape[-1] + 1
    q = np.sum(np.abs(zeta) ** 2, axis=-1)
    m = np.zeros(u.shape + (n + 1, n + 1), dtype=complex)
    m[..., 0, 0] = 1 - q / 2 + 1j * u
    m[..., 0, n] = q / 2 - 1j * u
    m[..., n, 0] = 1j * u - q / 2
    m[..., n, n] = 1 + q / 2 - 1j * u
    if n > 1:
        idx = np.arange(1, n)
        m[..., 0, 1:n] = zeta
        m[..., n, 1:n] = zeta
        m[..., 1:n, 0] = -np.conj(zeta)
        m[..., 1:n, n] = np.conj(zeta)
        m[..., idx, idx] = 1.0
    return m


def n_element(zeta, u: float) -> GroupElement:
    """n_{zeta,u} with zeta in C^{n-1} (empty for n = 1)."""
    zeta = np.atleast_1d(np.asarray(zeta, dtype=complex))
    return GroupElement(_n_matrices(zeta, np.asarray(u)))


def k_element(k, tol: float = TAU_GRP) -> GroupElement:
    k = np.atleast_2d(np.asarray(k, dtype=complex))
    n = k.shape[0]
    if np.max(np.abs(k.conj().T @ k - np.eye(n))) > tol:
        raise InvalidGroupElement("k is not unitary")
    m = np.zeros((n + 1, n + 1), dtype=complex)
    m[:n, :n] = k
    m[n, n] = np.conj(np.linalg.det(k))
    return GroupElement(m)


# --- coordinates on S --------------------------------------------------------
# Generator order for s_from_coords: A, then the N centre direction u, then
# Re/Im of each zeta component in index order.

def s_from_coords_batch(T: np.ndarray) -> np.ndarray:
    T = np.atleast_2d(np.asarray(T, dtype=float))
    if T.shape[-1] % 2:
        raise DomainError("S-coordinates come in 2n reals")
    n = T.shape[-1] // 2
    m = T.shape[0]
    out = _a_matrices(T[:, 0], n)
    out = out @ _n_matrices(np.zeros((m, n - 1)), T[:, 1])
    for k in range(n - 1):
        for j, unit in enumerate((1.0, 1j)):
            z = np.zeros((m, n - 1), dtype=complex)
            z[:, k] = unit * T[:, 2 + 2 * k + j]
            out = out @ _n_matrices(z, np.zeros(m))
    return out


def s_from_coords(tvec) -> GroupElement:
    """Ordered product of one-parameter subgroups of S."""
    return GroupElement(s_from_coords_batch(np.asarray(tvec, dtype=float)[None, :])[0])


def s_parameters(W: np.ndarray):
    """Closed-form (t, zeta, u) with (a_t n_{zeta,u}) . o = w.

    N fixes the boundary point e_1 and preserves the horospheres
    (1-|w|^2)/|1-w_1|^2 = const, on which a_t acts by the factor e^{2t}.
    """
    W = np.atleast_2d(np.asarray(W, dtype=complex))
    n = W.shape[-1]
    r2 = np.sum(np.abs(W) ** 2, axis=-1)
    h = (1.0 - r2) / np.abs(1.0 - W[:, 0]) ** 2
    t = 0.5 * np.log(h)
    V = act_batch(_a_matrices(-t, n), W)
    d = 1.0 / (1.0 - V[:, 0])
    zeta = np.conj(V[:, 1:] * d[:, None])
    u = -d.imag
    return t, zeta, u


def s_from_points(W: np.ndarray, tol: float = TAU_PT) -> np.ndarray:
    """Stack of s in S with s . o = w for each row of W."""
    W = np.atleast_2d(np.asarray(W, dtype=complex))
    n = W.shape[-1]
    t, zeta, u = s_parameters(W)
    S = _a_matrices(t, n) @ _n_matrices(zeta, u)
    err = np.max(np.abs(orbit_origin(S) - W), axis=-1) if len(W) else np.zeros(0)
    bad = np.nonzero(~(err <= tol))[0]
    for i in bad:
        S[i] = _newton_s_from_point(W[i], tol)
    return S


def _newton_s_from_point(w: np.ndarray, tol: float) -> np.ndarray:
    from scipy.optimize import least_squares

    n = w.shape[0]

    def resid(tv):
        p = orbit_origin(s_from_coords_batch(tv[None, :]))[0] - w
        return np.r_[p.real, p.imag]

    t0 = np.zeros(2 * n)
    t0[0] = np.arctanh(min(np.sqrt(np.vdot(w, w).real), 1 - 1e-12))
    sol = least_squares(resid, t0, xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=2000)
    s = s_from_coords_batch(sol.x[None, :])[0]
    if not np.max(np.abs(orbit_origin(s) - w)) <= tol:
        raise ConvergenceFailure(f"s_from_point did not reach tolerance for w={w}")
    return s


def s_from_point(w) -> GroupElement:
    return GroupElement(s_from_points(as_coords(w)[None, :])[0])


def in_S(x: GroupElement, tol: float = TAU_GRP) -> bool:
    """True if x lies in S = AN (checked by x = s_from_point(x.o))."""
    s = s_from_points((x.b / x.d)[None, :])[0]
    return bool(np.max(np.abs(s - x.matrix)) <= tol * max(1.0, np.max(np.abs(s))))
