"""
Markov chain detection over device states.

A transition never observed in benign training (count zero) is a malicious
transition; a session is malicious when its longest run of consecutive
malicious transitions exceeds the threshold.
"""

import logging
import math
from collections import Counter
from typing import Iterable, List, Sequence

from ..models.markov import TransitionModel
from ..schemas.core import Session
from ..schemas.reports import MarkovVerdict
from ..utils.exceptions import (
    InsufficientDataException,
    InvalidFrameException,
    InvalidTrainingDataException,
    MissingInitialDistributionException,
    ThresholdTypeException,
)

logger = logging.getLogger(__name__)


def train_markov(sessions: Iterable[Session]) -> TransitionModel:
    """
    Count consecutive-frame transitions within each benign session.

    The initial distribution Q is the raw frequency of first-frame states.

    Raises:
        InsufficientDataException: If no sessions are given
        InvalidTrainingDataException: If a session is not benign, is shorter
            than 2 frames, or widths disagree
    """
    counts: Counter = Counter()
    first_states: Counter = Counter()
    n_sensors = None
    trained = 0

    for session in sessions:
        if not session.is_benign:
            raise InvalidTrainingDataException(
                f"Session '{session.id}' is labeled {session.label.value}; training needs benign sessions",
                {"session_id": session.id, "label": session.label.value},
            )
        if len(session) < 2:
            raise InvalidTrainingDataException(
                f"Session '{session.id}' has fewer than 2 frames", {"session_id": session.id}
            )
        if n_sensors is None:
            n_sensors = session.n_channels
        elif session.n_channels != n_sensors:
            raise InvalidTrainingDataException(
                f"Session '{session.id}' has {session.n_channels} channels, expected {n_sensors}",
                {"session_id": session.id},
            )

        states = session.states()
        counts.update(zip(states[:-1], states[1:]))
        first_states[states[0]] += 1
        trained += 1

    if trained == 0:
        raise InsufficientDataException("No training sessions given")

    initial = {state: c / trained for state, c in sorted(first_states.items())}
    model = TransitionModel(n_sensors, counts, initial)
    logger.info(
        f"Trained transition model on {trained} sessions: "
        f"{len(model.counts)} transitions, {model.states_observed} states observed"
    )
    return model


def transition_prob(model: TransitionModel, a: int, b: int) -> float:
    """P(a, b) = N_ab / N_a; 0 when either count is zero."""
    return model.probability(a, b)


def sequence_probability(model: TransitionModel, states: Sequence[int]) -> float:
    """
    q_{x1} times the product of P(x_{t-1}, x_t).

    Raises:
        InsufficientDataException: If states is empty
        MissingInitialDistributionException: If the model has no Q
    """
    if not states:
        raise InsufficientDataException("Sequence must contain at least one state")
    if model.initial_distribution is None:
        raise MissingInitialDistributionException("Transition model has no initial distribution")

    probability = model.initial_distribution.get(states[0], 0.0)
    for src, dst in zip(states[:-1], states[1:]):
        if probability == 0.0:
            break
        probability *= model.probability(src, dst)
    return probability


def sequence_log_probability(model: TransitionModel, states: Sequence[int]) -> float:
    """Natural log of sequence_probability; -inf when any factor is zero."""
    if not states:
        raise InsufficientDataException("Sequence must contain at least one state")
    if model.initial_distribution is None:
        raise MissingInitialDistributionException("Transition model has no initial distribution")

    q = model.initial_distribution.get(states[0], 0.0)
    if q == 0.0:
        return -math.inf
    log_probability = math.log(q)
    for src, dst in zip(states[:-1], states[1:]):
        p = model.probability(src, dst)
        if p == 0.0:
            return -math.inf
        log_probability += math.log(p)
    return log_probability


def transition_flags(model: TransitionModel, states: Sequence[int]) -> List[int]:
    """1 for every consecutive pair with zero training count."""
    return [int(model.count(src, dst) == 0) for src, dst in zip(states[:-1], states[1:])]


def longest_run(flags: Sequence[int]) -> int:
    """Length of the longest run of consecutive 1-flags."""
    best = current = 0
    for flag in flags:
        current = current + 1 if flag else 0
        best = max(best, current)
    return best


def session_states(model: TransitionModel, session: Session) -> List[int]:
    """
    State ids of a session scored against model.

    Raises:
        InvalidFrameException: If the session width differs from the model's sensor count
        InsufficientDataException: If the session has fewer than 2 frames
    """
    if session.n_channels != model.n_sensors:
        raise InvalidFrameException(
            f"Session '{session.id}' has {session.n_channels} channels, model expects {model.n_sensors}",
            {"session_id": session.id, "width": session.n_channels, "expected": model.n_sensors},
        )
    if len(session) < 2:
        raise InsufficientDataException(
            f"Session '{session.id}' has fewer than 2 frames", {"session_id": session.id}
        )
    return session.states()


def score_session_markov(model: TransitionModel, session: Session, threshold: int) -> MarkovVerdict:
    """
    Flag unseen transitions and compare the longest run against the threshold.

    Malicious iff max run > threshold, so threshold 0 flags any unseen transition.

    Raises:
        ThresholdTypeException: If threshold is negative
        InvalidFrameException: If the session width differs from the model
        InsufficientDataException: If the session has fewer than 2 frames
    """
    if threshold < 0:
        raise ThresholdTypeException(
            f"Markov threshold must be a non-negative integer run length, got {threshold}",
            {"threshold": threshold},
        )

    flags = transition_flags(model, session_states(model, session))
    run = longest_run(flags)
    return MarkovVerdict(
        is_malicious=run > threshold,
        per_transition_flags=flags,
        max_consecutive_malicious=run,
        threshold_used=threshold,
    )
