"""
Decision-set geometry: origin-centred Euclidean balls, the shrunken copy
used by bandit learners, and Euclidean projection.

Only balls ship. ``ConvexSet`` describes what a learner needs from a
domain so another set could be dropped in later.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

import numpy as np

from .errors import InvalidInputError, ParameterError

# Absolute slack on the norm when testing membership.
FEASIBILITY_TOL = 1e-9


class ConvexSet(Protocol):
    def project(self, y: np.ndarray) -> np.ndarray: ...

    def contains(self, x: np.ndarray, tol: float = FEASIBILITY_TOL) -> bool: ...


def as_vector(y, name: str = "y") -> np.ndarray:
    """Return ``y`` as a finite 1-d float array or raise InvalidInputError."""
    arr = np.asarray(y, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidInputError(f"{name} must be a non-empty 1-d vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} has non-finite entries: {arr!r}")
    return arr


@dataclass(frozen=True)
class Ball:
    """Euclidean ball ``{x : ||x|| <= radius}`` centred at the origin."""

    radius: float

    def __post_init__(self):
        r = float(self.radius)
        if not np.isfinite(r) or r <= 0.0:
            raise ParameterError(f"ball radius must be positive and finite, got {self.radius!r}")
        object.__setattr__(self, "radius", r)

    def project(self, y) -> np.ndarray:
        return project(self, y)

    def contains(self, x, tol: float = FEASIBILITY_TOL) -> bool:
        return contains(self, x, tol)

    def shrink(self, delta: float, r: float) -> "Ball":
        return shrink(self, delta, r)


def project(domain: Ball, y) -> np.ndarray:
    """Euclidean projection of ``y`` onto ``domain``.

    Points inside the ball (the origin included) come back unchanged; others
    are scaled radially onto the sphere. The scaled point is nudged toward the
    origin by single ulps if rounding left it outside, so projecting twice
    returns the same bits as projecting once.
    """
    y = as_vector(y)
    norm = float(np.linalg.norm(y))
    if norm <= domain.radius:
        return y.copy()
    p = y * (domain.radius / norm)
    while np.linalg.norm(p) > domain.radius:
        p = np.nextafter(p, 0.0)
    return p


def contains(domain: Ball, x, tol: float = FEASIBILITY_TOL) -> bool:
    x = as_vector(x, "x")
    return bool(np.linalg.norm(x) <= domain.radius + tol)


def shrink(domain: Ball, delta: float, r: float) -> Ball:
    """Return ``(1 - delta/r) * domain``.

    ``r`` is the radius of a ball known to sit inside ``domain``; for every
    ``x`` in the result and every unit vector ``u``, ``x + delta*u`` stays in
    ``domain``.
    """
    delta = float(delta)
    r = float(r)
    if not (np.isfinite(delta) and np.isfinite(r)):
        raise ParameterError(f"delta and r must be finite, got delta={delta!r}, r={r!r}")
    if r <= 0.0 or r > domain.radius:
        raise ParameterError(f"inner radius r must lie in (0, {domain.radius}], got {r}")
    if not 0.0 < delta < r:
        raise ParameterError(f"need 0 < delta < r, got delta={delta}, r={r}")
    return Ball((1.0 - delta / r) * domain.radius)


def unit_vector(n: int, i: int) -> np.ndarray:
    """Basis vector e_i in R^n (1-based); ``i = 0`` gives the zero vector."""
    if not 0 <= i <= n:
        raise ParameterError(f"basis index must be in [0, {n}], got {i}")
    e = np.zeros(n)
    if i > 0:
        e[i - 1] = 1.0
    return e


def diagonal_start(domain: Ball, n: int) -> np.ndarray:
    """The point ``radius/sqrt(n) * (1, ..., 1)`` used to start every learner."""
    if n < 1:
        raise ParameterError(f"dimension must be >= 1, got {n}")
    return np.full(n, domain.radius / np.sqrt(n))
