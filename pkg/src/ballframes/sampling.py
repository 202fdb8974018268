"""Lattice families in S = AN and their images in the ball."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityExceeded, DomainError
from .group import GroupElement, TAU_PT, orbit_origin, s_from_coords_batch, s_from_points

DEFAULT_CAPACITY = 200_000
_BOX_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class PointFamily:
    """Points x_i in S together with w_i = x_i . o.

    ``tvecs`` holds the S-coordinates for lattice families and is None for
    families built from ball points.
    """

    X: np.ndarray
    W: np.ndarray
    epsilon: float = math.nan
    box_radius: float = math.nan
    tvecs: np.ndarray | None = None
    grid_index: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        W = np.atleast_2d(np.asarray(self.W, dtype=complex))
        object.__setattr__(self, "W", W)
        if W.shape[0] and not np.all(np.sum(np.abs(W) ** 2, axis=1) < 1):
            raise DomainError("family point outside the ball")
        if W.shape[0] and np.max(np.abs(orbit_origin(self.X) - W)) > TAU_PT:
            raise DomainError("x_i . o does not match w_i")
        keys = self.tvecs if self.tvecs is not None else np.c_[W.real, W.imag]
        if len(np.unique(np.round(keys, 12), axis=0)) != len(keys):
            raise DomainError("duplicate entries in family")

    @property
    def n(self) -> int:
        return self.W.shape[1]

    def __len__(self) -> int:
        return self.W.shape[0]

    @property
    def one_minus_r2(self) -> np.ndarray:
        return 1.0 - np.sum(np.abs(self.W) ** 2, axis=1)

    @property
    def entries(self):
        """(tvec, GroupElement, w, 1-|w|^2) per point."""
        om = self.one_minus_r2
        for i in range(len(self)):
            tv = None if self.tvecs is None else self.tvecs[i]
            yield tv, GroupElement(self.X[i]), self.W[i], om[i]

    @classmethod
    def from_points(cls, W, epsilon=math.nan) -> "PointFamily":
        W = np.atleast_2d(np.asarray(W, dtype=complex))
        return cls(s_from_points(W), W, epsilon)

    def subset(self, mask) -> "PointFamily":
        mask = np.asarray(mask)
        return PointFamily(
            self.X[mask], self.W[mask], self.epsilon, self.box_radius,
            None if self.tvecs is None else self.tvecs[mask],
            None if self.grid_index is None else self.grid_index[mask],
        )


def lattice_size(eps: float, box_radius: float, n: int) -> int:
    per_axis = 2 * int(math.floor(box_radius / (2 * eps) + _BOX_SLACK)) + 1
    return per_axis ** (2 * n)


def generate_lattice(eps: float, box_radius: float, n: int,
                     capacity: int = DEFAULT_CAPACITY) -> PointFamily:
    """Grid (2 eps) Z^{2n} inside the coordinate cube of half-width box_radius, mapped into S."""
    if not eps > 0:
        raise DomainError("epsilon must be positive")
    if not box_radius >= 0:
        raise DomainError("box radius must be non-negative")
    size = lattice_size(eps, box_radius, n)
    if size > capacity:
        raise CapacityExceeded(f"lattice would have {size} points (capacity {capacity})")
    kmax = int(math.floor(box_radius / (2 * eps) + _BOX_SLACK))
    ks = np.array(list(itertools.product(range(-kmax, kmax + 1), repeat=2 * n)), dtype=int)
    ks = ks.reshape(-1, 2 * n)
    T = ks * (2.0 * eps)
    X = s_from_coords_batch(T)
    return PointFamily(X, orbit_origin(X), float(eps), float(box_radius), T, ks)


def pseudo_hyperbolic_distance(z, w):
    """rho(z, w) with 1 - rho^2 = (1-|z|^2)(1-|w|^2) / |1 - <z,w>|^2.

    Evaluated as rho^2 = (|z-w|^2 - sum_{j<k} |z_j w_k - z_k w_j|^2) / |1-<z,w>|^2,
    which avoids cancellation for nearby points.  Broadcasts over leading axes.
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    diff = np.sum(np.abs(z - w) ** 2, axis=-1)
    n = z.shape[-1]
    wedge = 0.0
    for j in range(n):
        for k in range(j + 1, n):
            wedge = wedge + np.abs(z[..., j] * w[..., k] - z[..., k] * w[..., j]) ** 2
    den = np.abs(1.0 - np.sum(z * np.conj(w), axis=-1)) ** 2
    rho2 = np.clip((diff - wedge) / den, 0.0, None)
    return np.sqrt(np.minimum(rho2, 1.0))


def _nearest_distance(P: np.ndarray, W: np.ndarray, chunk: int = 2048, exclude_self=False) -> np.ndarray:
    out = np.empty(P.shape[0])
    for i in range(0, P.shape[0], chunk):
        D = pseudo_hyperbolic_distance(P[i : i + chunk, None, :], W[None, :, :])
        if exclude_self:
            idx = np.arange(i, min(i + chunk, P.shape[0]))
            D[idx - i, idx] = np.inf
        out[i : i + chunk] = D.min(axis=1) if D.shape[1] else np.inf
    return out


def min_separation(family: PointFamily) -> float:
    if len(family) < 2:
        return math.inf
    return float(_nearest_distance(family.W, family.W, exclude_self=True).min())


def separation_check(family: PointFamily, delta: float) -> bool:
    """Every pair of distinct points is at pseudo-hyperbolic distance >= delta."""
    if not delta > 0:
        raise DomainError("delta must be positive")
    return min_separation(family) >= delta


def probe_points(n: int, box_radius: float, step: float) -> np.ndarray:
    """Ball images of a fine S-coordinate grid covering the same box as a lattice."""
    k = int(math.floor(box_radius / step + _BOX_SLACK))
    ks = np.array(list(itertools.product(range(-k, k + 1), repeat=2 * n)), dtype=float)
    return orbit_origin(s_from_coords_batch(ks.reshape(-1, 2 * n) * step))


def density_check(family: PointFamily, eps_metric: float, probes=None) -> float:
    """Fraction of probe points within eps_metric of the family (pseudo-hyperbolic)."""
    if not eps_metric > 0:
        raise DomainError("eps_metric must be positive")
    if probes is None:
        step = family.epsilon / 2 if np.isfinite(family.epsilon) else 0.1
        probes = probe_points(family.n, family.box_radius, step)
    probes = np.atleast_2d(np.asarray(probes, dtype=complex))
    if len(family) == 0:
        return 0.0
    return float(np.mean(_nearest_distance(probes, family.W) <= eps_metric))


def adjacent_max_distance(family: PointFamily) -> float:
    """Largest rho between grid-adjacent lattice points (one coordinate step apart)."""
    if family.grid_index is None:
        raise DomainError("family has no grid structure")
    lookup = {tuple(k): i for i, k in enumerate(family.grid_index)}
    best = 0.0
    for i, k in enumerate(family.grid_index):
        for axis in range(k.size):
            nb = k.copy()
            nb[axis] += 1
            j = lookup.get(tuple(nb))
            if j is not None:
                best = max(best, float(pseudo_hyperbolic_distance(family.W[i], family.W[j])))
    return best
