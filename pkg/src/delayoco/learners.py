"""
Online learners for delayed feedback.

Each algorithm is written twice over: a pure ``*_step`` function mapping a
``LearnerState`` and the feedback delivered this round to the next state,
and a small ``Learner`` subclass that the harness drives round by round
(query, build feedback payload, update on delivery).

Full information: OGD-SC (no delay), DOGD, DOGD-SC.
Bandit: BDOGD-SC ((n+1)-point estimator), its two-point variant, DBGD.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import ClassVar, Mapping, NamedTuple, Sequence

import numpy as np

from .delays import ANONYMOUS, STAMPED, Stamped
from .errors import FeedbackError, ParameterError, ProtocolError, StateCorruptionError
from .estimators import (
    MultipointFeedback,
    TwopointFeedback,
    multipoint_estimate,
    sample_unit_sphere,
    twopoint_estimate,
)
from .geometry import Ball, contains, diagonal_start, project, shrink


@dataclass(frozen=True)
class LearnerState:
    """Iterate ``x`` for round ``t`` plus the bookkeeping the updates need.

    ``h`` is the inverse learning rate of the DOGD-SC family, ``received``
    counts consumed feedback, ``directions`` holds two-point sampling
    directions not yet matched with their feedback.
    """

    x: np.ndarray
    t: int = 1
    h: float = 0.0
    eta: float = 0.0
    received: int = 0
    directions: Mapping[int, np.ndarray] = field(default_factory=dict)


@dataclass(frozen=True)
class QueryBundle:
    points: tuple[np.ndarray, ...]
    direction: np.ndarray | None = None


class TwopointValues(NamedTuple):
    plus: float
    minus: float


def exact_sum(vectors: Sequence[np.ndarray]) -> np.ndarray:
    """Coordinate-wise correctly rounded sum; independent of the order of ``vectors``."""
    stacked = np.asarray(vectors, dtype=float)
    return np.array([math.fsum(col) for col in stacked.T])


def _inverse_rate_update(state: LearnerState, estimates: Sequence[np.ndarray], beta: float, domain: Ball) -> LearnerState:
    if not beta > 0:
        raise ParameterError(f"beta must be positive, got {beta}")
    h = state.h + len(estimates) * beta / 2.0
    if not estimates:
        return replace(state, t=state.t + 1, h=h)
    assert h > 0
    x = project(domain, state.x - (1.0 / h) * exact_sum(estimates))
    return replace(state, x=x, t=state.t + 1, h=h, received=state.received + len(estimates))


def dogd_sc_step(state: LearnerState, delivered: Sequence[np.ndarray], beta: float, domain: Ball) -> LearnerState:
    """One round of DOGD-SC.

    ``h`` grows by ``beta/2`` per delivered gradient; with any delivery the
    iterate moves to ``P(x - sum(g) / h)``, otherwise it stays put.
    """
    return _inverse_rate_update(state, [np.asarray(g, dtype=float) for g in delivered], beta, domain)


def ogd_sc_step(state: LearnerState, gradient, beta: float, domain: Ball) -> LearnerState:
    """Undelayed OGD with rate ``1/(beta t)``."""
    if state.t < 1:
        raise ProtocolError(f"round counter must be >= 1, got {state.t}")
    if not beta > 0:
        raise ParameterError(f"beta must be positive, got {beta}")
    eta = 1.0 / (beta * state.t)
    x = project(domain, state.x - eta * np.asarray(gradient, dtype=float))
    return replace(state, x=x, t=state.t + 1, eta=eta, received=state.received + 1)


def dogd_step(state: LearnerState, delivered: Sequence[np.ndarray], eta: float, domain: Ball) -> LearnerState:
    """DOGD: constant rate, one projected step on the sum of delivered gradients."""
    if not eta > 0:
        raise ParameterError(f"eta must be positive, got {eta}")
    if not delivered:
        return replace(state, t=state.t + 1, eta=eta)
    x = project(domain, state.x - eta * exact_sum(delivered))
    return replace(state, x=x, t=state.t + 1, eta=eta, received=state.received + len(delivered))


def _check_inside(state: LearnerState, domain: Ball) -> None:
    if not contains(domain, state.x):
        raise StateCorruptionError(
            f"iterate norm {np.linalg.norm(state.x):.12g} exceeds shrunken radius {domain.radius:.12g}"
        )


def bdogd_sc_queries(state: LearnerState, delta: float, domain: Ball) -> QueryBundle:
    """The n+1 points ``x, x + delta e_1, ..., x + delta e_n``; ``domain`` is the shrunken set."""
    _check_inside(state, domain)
    x = state.x
    offsets = x + delta * np.eye(x.shape[0])
    return QueryBundle((x.copy(), *offsets))


def _multipoint_estimates(delivered: Sequence[MultipointFeedback], n: int) -> list[np.ndarray]:
    out = []
    for fb in delivered:
        if not isinstance(fb, MultipointFeedback):
            raise FeedbackError(f"expected MultipointFeedback, got {type(fb).__name__}")
        if fb.n != n:
            raise FeedbackError(f"feedback carries {fb.n + 1} values, expected {n + 1}")
        out.append(multipoint_estimate(fb))
    return out


def bdogd_sc_step(
    state: LearnerState,
    delivered: Sequence[MultipointFeedback],
    beta: float,
    delta: float,
    domain: Ball,
) -> LearnerState:
    """BDOGD-SC: the DOGD-SC update driven by (n+1)-point estimates, projected onto the shrunken set."""
    estimates = _multipoint_estimates(delivered, state.x.shape[0])
    return _inverse_rate_update(state, estimates, beta, domain)


def twopoint_queries(state: LearnerState, delta: float, rng: np.random.Generator) -> tuple[QueryBundle, LearnerState]:
    """Sample ``u_t`` and return ``[x + delta u, x - delta u]`` with the state remembering ``u_t``."""
    u = sample_unit_sphere(rng, state.x.shape[0])
    bundle = QueryBundle((state.x + delta * u, state.x - delta * u), direction=u)
    directions = dict(state.directions)
    directions[state.t] = u
    return bundle, replace(state, directions=directions)


def twopoint_step(
    state: LearnerState,
    delivered: Sequence[Stamped],
    beta: float,
    delta: float,
    domain: Ball,
) -> LearnerState:
    """Two-point variant: match each stamped payload with its stored direction, then DOGD-SC update."""
    directions = dict(state.directions)
    estimates = []
    for item in delivered:
        if not isinstance(item, Stamped):
            raise ProtocolError("two-point feedback arrived without a time stamp; run the buffer in stamped mode")
        u = directions.pop(item.round, None)
        if u is None:
            raise ProtocolError(f"no stored direction for query round {item.round}")
        plus, minus = item.payload
        estimates.append(twopoint_estimate(TwopointFeedback(plus, minus, u, delta)))
    return _inverse_rate_update(replace(state, directions=directions), estimates, beta, domain)


def dbgd_step(
    state: LearnerState,
    delivered: Sequence[MultipointFeedback],
    eta: float,
    delta: float,
    domain: Ball,
) -> LearnerState:
    """DBGD: one projected constant-rate step per delivered estimate, in delivery order."""
    if not eta > 0:
        raise ParameterError(f"eta must be positive, got {eta}")
    x = state.x
    for g in _multipoint_estimates(delivered, x.shape[0]):
        x = project(domain, x - eta * g)
    return replace(state, x=x, t=state.t + 1, eta=eta, received=state.received + len(delivered))


class Learner:
    """Round-by-round driver around one of the step functions.

    Per round the harness calls ``query``, evaluates the true loss at the
    returned points, wraps the result with ``feedback`` and routes it through
    a FeedbackBuffer; whatever arrives that round is passed to ``update``.
    """

    name: ClassVar[str]
    bandit: ClassVar[bool] = False
    feedback_mode: ClassVar[str] = ANONYMOUS
    # False for the undelayed baseline: the harness feeds it unit delays.
    delayed: ClassVar[bool] = True

    def __init__(self, state: LearnerState, domain: Ball):
        self.state = state
        self.domain = domain

    @property
    def x(self) -> np.ndarray:
        return self.state.x

    def query(self, rng: np.random.Generator | None = None) -> QueryBundle:
        return QueryBundle((self.state.x.copy(),))

    def feedback(self, loss, bundle: QueryBundle, values: np.ndarray):
        return loss.gradient(bundle.points[0])

    def update(self, delivered: list) -> None:
        raise NotImplementedError


class OGDSC(Learner):
    name = "ogd_sc"
    delayed = False

    def __init__(self, n: int, domain: Ball, beta: float):
        super().__init__(LearnerState(diagonal_start(domain, n)), domain)
        self.beta = beta

    def update(self, delivered):
        if len(delivered) != 1:
            raise ProtocolError(f"OGD-SC expects exactly one gradient per round, got {len(delivered)}")
        self.state = ogd_sc_step(self.state, delivered[0], self.beta, self.domain)


class DOGD(Learner):
    name = "dogd"

    def __init__(self, n: int, domain: Ball, eta: float):
        super().__init__(LearnerState(diagonal_start(domain, n), eta=eta), domain)
        self.eta = eta

    def update(self, delivered):
        self.state = dogd_step(self.state, delivered, self.eta, self.domain)


class DOGDSC(Learner):
    name = "dogd_sc"

    def __init__(self, n: int, domain: Ball, beta: float):
        super().__init__(LearnerState(diagonal_start(domain, n)), domain)
        self.beta = beta

    def update(self, delivered):
        self.state = dogd_sc_step(self.state, delivered, self.beta, self.domain)


class _BanditLearner(Learner):
    bandit = True

    def __init__(self, n: int, domain: Ball, delta: float, r: float, **extra):
        self.full_domain = domain
        shrunk = shrink(domain, delta, r)
        super().__init__(LearnerState(diagonal_start(shrunk, n), **extra), shrunk)
        self.delta = delta
        self.r = r


class BDOGDSC(_BanditLearner):
    name = "bdogd_sc"

    def __init__(self, n: int, domain: Ball, beta: float, delta: float, r: float):
        super().__init__(n, domain, delta, r)
        self.beta = beta

    def query(self, rng=None):
        return bdogd_sc_queries(self.state, self.delta, self.domain)

    def feedback(self, loss, bundle, values):
        return MultipointFeedback.from_values(values, self.delta)

    def update(self, delivered):
        self.state = bdogd_sc_step(self.state, delivered, self.beta, self.delta, self.domain)


class TwoPointDOGDSC(_BanditLearner):
    name = "twopoint"
    feedback_mode = STAMPED

    def __init__(self, n: int, domain: Ball, beta: float, delta: float, r: float):
        super().__init__(n, domain, delta, r)
        self.beta = beta

    def query(self, rng=None):
        if rng is None:
            raise ParameterError("the two-point learner needs a random generator to sample directions")
        _check_inside(self.state, self.domain)
        bundle, self.state = twopoint_queries(self.state, self.delta, rng)
        return bundle

    def feedback(self, loss, bundle, values):
        return TwopointValues(float(values[0]), float(values[1]))

    def update(self, delivered):
        self.state = twopoint_step(self.state, delivered, self.beta, self.delta, self.domain)


class DBGD(_BanditLearner):
    name = "dbgd"

    def __init__(self, n: int, domain: Ball, eta: float, delta: float, r: float):
        super().__init__(n, domain, delta, r, eta=eta)
        self.eta = eta

    def query(self, rng=None):
        return bdogd_sc_queries(self.state, self.delta, self.domain)

    def feedback(self, loss, bundle, values):
        return MultipointFeedback.from_values(values, self.delta)

    def update(self, delivered):
        self.state = dbgd_step(self.state, delivered, self.eta, self.delta, self.domain)


LEARNERS: dict[str, type[Learner]] = {
    cls.name: cls for cls in (OGDSC, DOGD, DOGDSC, BDOGDSC, TwoPointDOGDSC, DBGD)
}
