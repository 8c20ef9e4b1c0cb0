"""Quantities from the regret analysis, exposed so they can be checked numerically."""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from .delays import ArrivalSets
from .errors import ParameterError


def prefix_weighted_sum(a: Sequence[float], f: Callable[[float], float]) -> float:
    """``sum_i a_i f(a_1 + ... + a_i)``."""
    a = np.asarray(a, dtype=float)
    if a.size == 0 or not a[0] > 0 or np.any(a[1:] < 0):
        raise ParameterError("need a_1 > 0 and a_2..a_m >= 0")
    partial = np.cumsum(a)
    return math.fsum(ai * f(si) for ai, si in zip(a, partial))


def integral_upper_bound(a: Sequence[float], f: Callable[[float], float], antiderivative: Callable[[float], float]) -> float:
    """``a_1 f(a_1) + int_{a_1}^{a_1+...+a_m} f``, using a closed-form antiderivative."""
    a = np.asarray(a, dtype=float)
    total = float(np.sum(a))
    return a[0] * f(a[0]) + antiderivative(total) - antiderivative(a[0])


def inverse_rates(arrivals: ArrivalSets, beta: float) -> np.ndarray:
    """``h_t`` for t = 1 .. T+d-1, continuing the recursion past T as if every late gradient were used."""
    return np.cumsum(arrivals.sizes()) * (beta / 2.0)


def arrival_rate_sum(arrivals: ArrivalSets, beta: float) -> float:
    """``sum_{t=s}^{T+d-1} |F_t| / (2 h_t)``."""
    sizes = arrivals.sizes()
    h = inverse_rates(arrivals, beta)
    mask = sizes > 0
    return math.fsum(sizes[mask] / (2.0 * h[mask]))


def log_rate_bound(arrivals: ArrivalSets, beta: float) -> float:
    """``(1/beta) (1 + ln(T / |F_s|))``, the closed-form cap on ``arrival_rate_sum``."""
    first = len(arrivals[arrivals.s])
    return (1.0 + math.log(arrivals.T / first)) / beta


def dogd_sc_regret_bound(beta: float, R: float, L: float, arrivals: ArrivalSets) -> float:
    """Worst-case regret guarantee ``(4 beta R L + 5 L^2) (d / beta) (1 + ln(T / |F_s|))``."""
    return (4 * beta * R * L + 5 * L * L) * (arrivals.d / beta) * (1.0 + math.log(arrivals.T / len(arrivals[arrivals.s])))
