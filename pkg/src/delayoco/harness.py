"""
Experiment orchestration: configuration, seeded simulation, regret
accounting and CSV output.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .delays import DelaySchedule, FeedbackBuffer
from .errors import ParameterError
from .geometry import Ball
from .learners import BDOGDSC, DBGD, DOGD, DOGDSC, LEARNERS, OGDSC, Learner, TwoPointDOGDSC
from .losses import QuadraticLoss, offline_optimum, sample_quadratics

ALGORITHMS = tuple(LEARNERS)
BANDIT_ALGORITHMS = ("bdogd_sc", "twopoint", "dbgd")

# delta rules: ("fixed", value), ("lnT_over_T", c), ("inv_T_plus_D", None)
DEFAULT_DELTA_RULES = {
    "bdogd_sc": ("lnT_over_T", 1.0),
    "twopoint": ("lnT_over_T", 1.0),
    "dbgd": ("inv_T_plus_D", None),
}


@dataclass(frozen=True)
class ExperimentConfig:
    algorithm: str
    schedule: DelaySchedule
    T: int = 1000
    n: int = 10
    R: float = 1.0
    r: float | None = None
    beta: float = 2.0
    alpha: float = 2.0
    L: float | None = None
    delta_rule: tuple = ()
    seed: int = 0
    output_path: str | None = None

    def __post_init__(self):
        if self.algorithm not in LEARNERS:
            raise ParameterError(f"unknown algorithm {self.algorithm!r}; choose from {', '.join(ALGORITHMS)}")
        if self.T < 1:
            raise ParameterError(f"T must be >= 1, got {self.T}")
        if self.n < 1:
            raise ParameterError(f"dimension must be >= 1, got {self.n}")
        if not self.R > 0:
            raise ParameterError(f"radius must be positive, got {self.R}")
        if self.schedule.T != self.T:
            raise ParameterError(f"schedule covers {self.schedule.T} rounds but T={self.T}")
        if self.r is None:
            object.__setattr__(self, "r", self.R)
        if not 0 < self.r <= self.R:
            raise ParameterError(f"inner radius r must lie in (0, R], got r={self.r}, R={self.R}")
        if self.L is None:
            # quadratic family: ||2x + b|| <= 2R + sqrt(n)
            object.__setattr__(self, "L", 2.0 * self.R + math.sqrt(self.n))
        if not self.delta_rule and self.algorithm in DEFAULT_DELTA_RULES:
            object.__setattr__(self, "delta_rule", DEFAULT_DELTA_RULES[self.algorithm])
        if self.algorithm in BANDIT_ALGORITHMS:
            delta = self.delta
            if not 0 < delta < self.r:
                raise ParameterError(f"need 0 < delta < r; delta resolved to {delta} with r={self.r}")

    @property
    def is_bandit(self) -> bool:
        return self.algorithm in BANDIT_ALGORITHMS

    @property
    def total_delay(self) -> int:
        return self.schedule.total_delay

    @property
    def delta(self) -> float | None:
        return resolve_delta(self.delta_rule, self.T, self.total_delay) if self.delta_rule else None

    @property
    def eta(self) -> float:
        """Constant rate ``1 / (L sqrt(T + D))`` for DOGD and DBGD."""
        return 1.0 / (self.L * math.sqrt(self.T + self.total_delay))


def resolve_delta(rule: tuple, T: int, D: int) -> float:
    kind, value = rule
    if kind == "fixed":
        return float(value)
    if kind == "lnT_over_T":
        return float(value) * math.log(T) / T
    if kind == "inv_T_plus_D":
        return 1.0 / (T + D)
    raise ParameterError(f"unknown delta rule {kind!r}")


def make_learner(config: ExperimentConfig) -> Learner:
    domain = Ball(config.R)
    algo = config.algorithm
    if algo == "ogd_sc":
        return OGDSC(config.n, domain, config.beta)
    if algo == "dogd":
        return DOGD(config.n, domain, config.eta)
    if algo == "dogd_sc":
        return DOGDSC(config.n, domain, config.beta)
    if algo == "bdogd_sc":
        return BDOGDSC(config.n, domain, config.beta, config.delta, config.r)
    if algo == "twopoint":
        return TwoPointDOGDSC(config.n, domain, config.beta, config.delta, config.r)
    return DBGD(config.n, domain, config.eta, config.delta, config.r)


def instantaneous_loss(algorithm: str, values) -> float:
    """Loss charged for one round: the mean of ``f_t`` over that round's query points.

    For full-information learners that is ``f_t(x_t)``; bandit learners are
    charged the average over their n+1 (or 2) queries.
    """
    values = np.asarray(values, dtype=float).reshape(-1)
    if algorithm in ("ogd_sc", "dogd", "dogd_sc"):
        ok = values.size == 1
    elif algorithm == "twopoint":
        ok = values.size == 2
    elif algorithm in ("bdogd_sc", "dbgd"):
        ok = values.size >= 2
    else:
        raise ParameterError(f"unknown algorithm {algorithm!r}")
    if not ok:
        raise ParameterError(f"{algorithm} round record has {values.size} values")
    return math.fsum(values) / values.size


@dataclass
class RegretLedger:
    loss: np.ndarray
    cum_loss: np.ndarray
    cum_regret: np.ndarray
    comparator_total: float
    algorithm: str = ""

    @property
    def T(self) -> int:
        return self.loss.shape[0]

    @property
    def rounds(self) -> np.ndarray:
        return np.arange(1, self.T + 1)

    @property
    def final_loss(self) -> float:
        return float(self.cum_loss[-1])

    @property
    def final_regret(self) -> float:
        return float(self.cum_regret[-1])

    @classmethod
    def from_losses(cls, loss, comparator_losses, algorithm: str = "") -> "RegretLedger":
        """Build the ledger from per-round learner losses and the comparator's per-round losses."""
        loss = np.asarray(loss, dtype=float)
        comp = np.asarray(comparator_losses, dtype=float)
        cum_loss = np.cumsum(loss)
        cum_comp = np.cumsum(comp)
        return cls(loss, cum_loss, cum_loss - cum_comp, float(cum_comp[-1]), algorithm)


@dataclass
class RunResult:
    ledger: RegretLedger
    iterates: np.ndarray
    losses: list = field(repr=False)
    late_feedback: int = 0


def simulate(
    learner: Learner,
    losses: Sequence[QuadraticLoss],
    schedule: DelaySchedule,
    rng: np.random.Generator | None = None,
    comparator_domain: Ball | None = None,
    mode: str | None = None,
) -> RunResult:
    """Play ``learner`` against a fixed loss sequence under ``schedule``.

    Feedback landing after round T is flushed through the buffer (and
    counted in ``late_feedback``) but never given to the learner.
    """
    T = len(losses)
    if schedule.T != T:
        raise ParameterError(f"schedule covers {schedule.T} rounds but there are {T} losses")
    if not learner.delayed:
        schedule = DelaySchedule.unit(T)
    buffer = FeedbackBuffer(mode or learner.feedback_mode)
    per_round = np.empty(T)
    iterates = np.empty((T, learner.x.shape[0]))
    for t in range(1, T + 1):
        f = losses[t - 1]
        iterates[t - 1] = learner.x
        bundle = learner.query(rng)
        values = np.array([float(f.value(p)) for p in bundle.points])
        per_round[t - 1] = instantaneous_loss(learner.name, values)
        buffer.enqueue(t, schedule.delay(t), learner.feedback(f, bundle, values))
        learner.update(buffer.deliver(t))
    late = buffer.flush(T + 1, T + schedule.max_delay - 1)
    if len(buffer):
        raise AssertionError(f"{len(buffer)} feedback items never arrived")

    comparator = offline_optimum(losses, comparator_domain or Ball(losses[0].radius))
    comp_losses = np.array([float(f.value(comparator.x_star)) for f in losses])
    ledger = RegretLedger.from_losses(per_round, comp_losses, learner.name)
    return RunResult(ledger, iterates, list(losses), len(late))


def draw_losses(config: ExperimentConfig) -> list[QuadraticLoss]:
    loss_rng, _ = _streams(config.seed)
    return sample_quadratics(loss_rng, config.T, config.n, config.R)


def _streams(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    # independent streams: losses are identical across algorithms for one seed
    loss_seq, learner_seq = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(loss_seq), np.random.default_rng(learner_seq)


def run_detailed(config: ExperimentConfig) -> RunResult:
    loss_rng, learner_rng = _streams(config.seed)
    losses = sample_quadratics(loss_rng, config.T, config.n, config.R)
    return simulate(make_learner(config), losses, config.schedule, learner_rng, Ball(config.R))


def run_experiment(config: ExperimentConfig) -> RegretLedger:
    ledger = run_detailed(config).ledger
    if config.output_path:
        write_csv(ledger, config.output_path)
    return ledger


CSV_HEADER = ("t", "loss", "cum_loss", "cum_regret")


def write_csv(ledger: RegretLedger, path: str | Path) -> None:
    path = Path(path)
    try:
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for t, a, b, c in zip(ledger.rounds, ledger.loss, ledger.cum_loss, ledger.cum_regret):
                writer.writerow((int(t), f"{a:.12g}", f"{b:.12g}", f"{c:.12g}"))
    except OSError as exc:
        raise OSError(f"cannot write ledger to {path}: {exc}") from exc


def read_csv(path: str | Path) -> dict[str, np.ndarray]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        rows = [tuple(float(v) for v in row) for row in reader]
    cols = np.array(rows).T if rows else np.empty((4, 0))
    return {name: col for name, col in zip(CSV_HEADER, cols)}
