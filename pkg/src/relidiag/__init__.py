"""Probabilistic model-based diagnosis with reliability-derived priors.

Component failure priors come from MTBF or Weibull hazard data instead of
hand-assessed probabilities, a Markov persistence model carries the belief
over candidates across time-tagged observations and repairs, and repair
decisions are ranked by expected cost.
"""

from .decision import (
    ACTIONS,
    DONT_FIX,
    FIX,
    CompositeDecision,
    CostTable,
    DecisionEvaluation,
    expected_cost,
    optimal_decision_factored,
    rank_decisions,
)
from .engine import (
    BeliefState,
    Event,
    Observe,
    Repair,
    Scenario,
    advance,
    apply_event,
    assimilate,
    initial_belief,
    load_scenario,
    marginal,
    parse_scenario,
    repair,
    run_events,
)
from .errors import (
    DiagnosisError,
    EventError,
    InconsistentObservationError,
    IncompleteInputError,
    InvalidComponentError,
    InvalidDecisionError,
    InvalidParameterError,
    InvalidTimeError,
    ModelFormatError,
    ModelTooLargeError,
)
from .model import (
    BROKEN,
    MODES,
    OK,
    Behavior,
    Candidate,
    ComponentSpec,
    Observation,
    SystemModel,
    Variable,
    enumerate_candidates,
    likelihood,
    load_model,
    parse_model,
    simulate,
    validate_model,
)
from .reliability import (
    ConstantRate,
    HazardModel,
    TransitionMatrix,
    Weibull,
    conditional_failure_probability,
    cumulative_hazard,
    rate_from_mtbf,
    transition_matrix,
)

__version__ = "0.1.0"
