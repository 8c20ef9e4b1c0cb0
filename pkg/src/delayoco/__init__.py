"""Online strongly convex optimization with unknown feedback delays."""

from .delays import (
    HIGH_DELAY_PATTERN,
    LOW_DELAY_PATTERN,
    ArrivalSets,
    DelaySchedule,
    FeedbackBuffer,
    Stamped,
    arrival_sets,
    parse_schedule,
)
from .errors import (
    DelayOCOError,
    DomainError,
    FeedbackError,
    InvalidInputError,
    NumericalError,
    ParameterError,
    ProtocolError,
    ScheduleError,
    StateCorruptionError,
)
from .estimators import (
    MultipointFeedback,
    TwopointFeedback,
    multipoint_estimate,
    sample_unit_ball,
    sample_unit_sphere,
    smoothed_value_mc,
    twopoint_estimate,
)
from .geometry import Ball, contains, project, shrink
from .harness import ExperimentConfig, RegretLedger, instantaneous_loss, run_experiment, write_csv
from .learners import (
    BDOGDSC,
    DBGD,
    DOGD,
    DOGDSC,
    LEARNERS,
    OGDSC,
    LearnerState,
    QueryBundle,
    TwoPointDOGDSC,
)
from .losses import Comparator, LossOracle, QuadraticLoss, offline_optimum, pgd_comparator_oracle, sample_quadratic

__version__ = "0.1.0"
