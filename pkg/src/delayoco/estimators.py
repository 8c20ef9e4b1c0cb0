"""
Zeroth-order gradient estimators built from function values only.

The estimators are pure functions of feedback that was already collected;
they never evaluate a loss themselves. ``smoothed_value_mc`` and
``smoothed_samples`` do evaluate the loss, for probing the ball-smoothed
function in tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, FeedbackError, ParameterError
from .geometry import FEASIBILITY_TOL, Ball


@dataclass(frozen=True)
class MultipointFeedback:
    """``f(x)`` and ``f(x + delta e_i)`` for i = 1..n."""

    base_value: float
    offset_values: np.ndarray
    delta: float

    def __post_init__(self):
        if not self.delta > 0:
            raise ParameterError(f"delta must be positive, got {self.delta}")
        object.__setattr__(self, "offset_values", np.asarray(self.offset_values, dtype=float))

    @property
    def n(self) -> int:
        return self.offset_values.shape[0]

    @classmethod
    def from_values(cls, values, delta: float) -> "MultipointFeedback":
        """Split the n+1 query values ``[f(x), f(x+de_1), ..., f(x+de_n)]``."""
        values = np.asarray(values, dtype=float)
        if values.ndim != 1 or values.shape[0] < 2:
            raise FeedbackError(f"need n+1 >= 2 values, got shape {values.shape}")
        return cls(float(values[0]), values[1:], delta)


@dataclass(frozen=True)
class TwopointFeedback:
    """``f(x + delta u)`` and ``f(x - delta u)`` for a unit direction ``u``."""

    plus_value: float
    minus_value: float
    direction: np.ndarray
    delta: float

    def __post_init__(self):
        if not self.delta > 0:
            raise ParameterError(f"delta must be positive, got {self.delta}")
        u = np.asarray(self.direction, dtype=float)
        if abs(np.linalg.norm(u) - 1.0) > 1e-12:
            raise ParameterError(f"direction must be a unit vector, |u| = {np.linalg.norm(u)!r}")
        object.__setattr__(self, "direction", u)


def forward_difference_gradient(base_value, offset_values, delta: float) -> np.ndarray:
    """``(f(x + delta e_i) - f(x)) / delta`` coordinate-wise; broadcasts over leading axes."""
    if not delta > 0:
        raise ParameterError(f"delta must be positive, got {delta}")
    base = np.asarray(base_value, dtype=float)
    return (np.asarray(offset_values, dtype=float) - base[..., None]) / delta


def multipoint_estimate(fb: MultipointFeedback) -> np.ndarray:
    return forward_difference_gradient(fb.base_value, fb.offset_values, fb.delta)


def symmetric_difference_gradient(plus_value, minus_value, direction, delta: float) -> np.ndarray:
    """``n/(2 delta) * (f(x + delta u) - f(x - delta u)) * u``; broadcasts over rows of ``direction``."""
    if not delta > 0:
        raise ParameterError(f"delta must be positive, got {delta}")
    u = np.asarray(direction, dtype=float)
    n = u.shape[-1]
    diff = np.asarray(plus_value, dtype=float) - np.asarray(minus_value, dtype=float)
    return (n / (2.0 * delta)) * diff[..., None] * u


def twopoint_estimate(fb: TwopointFeedback, n: int | None = None) -> np.ndarray:
    if n is not None and n != fb.direction.shape[0]:
        raise FeedbackError(f"direction has dimension {fb.direction.shape[0]}, expected {n}")
    return symmetric_difference_gradient(fb.plus_value, fb.minus_value, fb.direction, fb.delta)


def sample_unit_sphere(rng: np.random.Generator, n: int, size: int | None = None) -> np.ndarray:
    """Uniform direction(s) on the unit sphere in R^n via normalised Gaussians."""
    if n < 1:
        raise ParameterError(f"dimension must be >= 1, got {n}")
    shape = (n,) if size is None else (size, n)
    z = rng.standard_normal(shape)
    norms = np.linalg.norm(z, axis=-1, keepdims=True)
    # an all-zero draw has probability 0, but redraw rather than divide by zero
    while np.any(norms == 0.0):
        zero = (norms == 0.0).reshape(-1)
        z_flat = z.reshape(-1, n)
        z_flat[zero] = rng.standard_normal((int(zero.sum()), n))
        z = z_flat.reshape(shape)
        norms = np.linalg.norm(z, axis=-1, keepdims=True)
    return z / norms


def sample_unit_ball(rng: np.random.Generator, n: int, size: int | None = None) -> np.ndarray:
    """Uniform point(s) in the unit ball: sphere direction scaled by ``U^(1/n)``."""
    u = sample_unit_sphere(rng, n, size)
    radii = rng.uniform(size=None if size is None else (size, 1)) ** (1.0 / n)
    return u * radii


def smoothed_samples(f, x, delta: float, m: int, rng: np.random.Generator, domain: Ball | None = None) -> np.ndarray:
    """Values ``f(x + delta v_j)`` for ``m`` uniform ball draws ``v_j``."""
    if m < 1:
        raise ParameterError(f"need m >= 1 samples, got {m}")
    if not delta > 0:
        raise ParameterError(f"delta must be positive, got {delta}")
    x = np.asarray(x, dtype=float)
    probes = x + delta * sample_unit_ball(rng, x.shape[0], m)
    if domain is not None:
        norms = np.linalg.norm(probes, axis=1)
        if np.any(norms > domain.radius + FEASIBILITY_TOL):
            raise DomainError(f"smoothing probe leaves the domain (max norm {norms.max():.6g} > {domain.radius})")
    return np.asarray(f.value(probes), dtype=float)


def smoothed_value_mc(f, x, delta: float, m: int, rng: np.random.Generator, domain: Ball | None = None) -> float:
    """Monte Carlo estimate of ``E_{v ~ unit ball}[f(x + delta v)]``."""
    return float(np.mean(smoothed_samples(f, x, delta, m, rng, domain)))
