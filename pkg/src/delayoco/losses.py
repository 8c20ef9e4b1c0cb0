"""
Loss oracles, the random quadratic family, and the offline comparator.

Every loss exposes ``value``, ``gradient`` and the constants ``beta``
(strong convexity), ``alpha`` (smoothness) and ``lipschitz``. ``value``
accepts a single point of shape (n,) or a batch of shape (m, n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Protocol, Sequence

import numpy as np

from .errors import NumericalError, ParameterError
from .geometry import Ball, as_vector, project


class Loss(Protocol):
    beta: float
    alpha: float
    lipschitz: float

    def value(self, x: np.ndarray): ...

    def gradient(self, x: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True)
class LossOracle:
    """A loss given by plain callables.

    ``value_fn`` maps one point to a float. Set ``vectorized=True`` if it
    already handles (m, n) batches.
    """

    value_fn: Callable[[np.ndarray], float]
    gradient_fn: Callable[[np.ndarray], np.ndarray]
    beta: float = 0.0
    alpha: float = 0.0
    lipschitz: float = math.inf
    vectorized: bool = False
    n: int | None = None

    def value(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 1 or self.vectorized:
            return self.value_fn(x)
        return np.array([self.value_fn(row) for row in x])

    def gradient(self, x) -> np.ndarray:
        return np.asarray(self.gradient_fn(np.asarray(x, dtype=float)), dtype=float)


@dataclass(frozen=True)
class QuadraticLoss:
    """``f(x) = ||x||^2 + b.x`` on a ball of radius ``radius``."""

    b: np.ndarray
    radius: float = 1.0
    beta: float = field(default=2.0, init=False)
    alpha: float = field(default=2.0, init=False)

    @property
    def n(self) -> int:
        return self.b.shape[0]

    @property
    def lipschitz(self) -> float:
        # ||2x + b|| <= 2R + sqrt(n) since every |b_i| <= 1.
        return 2.0 * self.radius + math.sqrt(self.n)

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return np.sum(x * x, axis=-1) + x @ self.b

    def gradient(self, x) -> np.ndarray:
        return 2.0 * np.asarray(x, dtype=float) + self.b


def sample_quadratic(rng: np.random.Generator, n: int, radius: float = 1.0) -> QuadraticLoss:
    """Draw one quadratic with ``b`` uniform on [-1, 1]^n."""
    if n < 1:
        raise ParameterError(f"dimension must be >= 1, got {n}")
    return QuadraticLoss(rng.uniform(-1.0, 1.0, size=n), radius)


def sample_quadratics(rng: np.random.Generator, T: int, n: int, radius: float = 1.0) -> list[QuadraticLoss]:
    """Draw the whole loss sequence up front (oblivious adversary)."""
    if T < 1:
        raise ParameterError(f"horizon must be >= 1, got {T}")
    return [sample_quadratic(rng, n, radius) for _ in range(T)]


@dataclass(frozen=True)
class Comparator:
    x_star: np.ndarray
    total_loss: float


def offline_optimum(losses: Sequence[QuadraticLoss], domain: Ball) -> Comparator:
    """Best fixed decision in hindsight for a quadratic sequence.

    The sum is ``T||x||^2 + (sum b).x`` with isotropic Hessian, so the
    constrained minimiser is the projection of ``-(sum b) / 2T``.
    """
    if len(losses) == 0:
        raise ParameterError("offline_optimum needs at least one loss")
    T = len(losses)
    b_sum = np.sum([f.b for f in losses], axis=0)
    x_star = project(domain, -b_sum / (2.0 * T))
    total = T * float(x_star @ x_star) + float(b_sum @ x_star)
    return Comparator(x_star, total)


def total_loss(losses: Sequence[Loss], x: np.ndarray) -> float:
    return math.fsum(float(f.value(x)) for f in losses)


def gradient_mapping(losses: Sequence[Loss], domain: Ball, x: np.ndarray, step: float) -> np.ndarray:
    """``(x - P(x - step * grad F(x))) / step`` for ``F = sum f_t``; zero exactly at the constrained optimum."""
    g = np.sum([f.gradient(x) for f in losses], axis=0)
    return (x - project(domain, x - step * g)) / step


def pgd_comparator_oracle(
    losses: Sequence[Loss],
    domain: Ball,
    iters: int = 1000,
    step_rule: Callable[[int], float] | None = None,
    x0: np.ndarray | None = None,
    patience: int = 100,
) -> Comparator:
    """Projected gradient descent on ``sum f_t`` over ``domain``.

    The default step at iteration k is ``1 / (k * sum beta_t)``. Returns the
    iterate with the lowest total loss. Raises NumericalError if the total
    loss increases for ``patience`` consecutive iterations.
    """
    if len(losses) == 0:
        raise ParameterError("pgd_comparator_oracle needs at least one loss")
    beta_sum = sum(f.beta for f in losses)
    if step_rule is None:
        if beta_sum <= 0:
            raise ParameterError("default step rule needs strongly convex losses")
        step_rule = lambda k: 1.0 / (beta_sum * k)  # noqa: E731

    if x0 is None:
        n = getattr(losses[0], "n", None)
        if n is None:
            raise ParameterError("pass x0 or use losses that expose their dimension n")
        x0 = np.zeros(n)
    x = project(domain, x0)
    best_x, best_val = x, total_loss(losses, x)
    prev_val, rising = best_val, 0
    for k in range(1, iters + 1):
        g = np.sum([f.gradient(x) for f in losses], axis=0)
        x = project(domain, x - step_rule(k) * g)
        val = total_loss(losses, x)
        if not math.isfinite(val):
            raise NumericalError(f"PGD produced a non-finite loss at iteration {k}")
        rising = rising + 1 if val > prev_val else 0
        if rising >= patience:
            raise NumericalError(f"PGD loss increased for {patience} consecutive iterations (k={k})")
        prev_val = val
        if val < best_val:
            best_x, best_val = x, val
    return Comparator(best_x, best_val)


def check_strong_convexity(loss: Loss, x: np.ndarray, y: np.ndarray) -> float:
    """Slack of the strong-convexity inequality at (x, y); non-negative when it holds."""
    x, y = as_vector(x, "x"), as_vector(y, "y")
    diff = y - x
    lower = float(loss.value(x)) + float(loss.gradient(x) @ diff) + 0.5 * loss.beta * float(diff @ diff)
    return float(loss.value(y)) - lower


def check_smoothness(loss: Loss, x: np.ndarray, y: np.ndarray) -> float:
    """Slack of the smoothness upper bound at (x, y); non-negative when it holds."""
    x, y = as_vector(x, "x"), as_vector(y, "y")
    diff = y - x
    upper = float(loss.value(x)) + float(loss.gradient(x) @ diff) + 0.5 * loss.alpha * float(diff @ diff)
    return upper - float(loss.value(y))
