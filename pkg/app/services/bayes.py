"""
Naive Bayes detection over activity models.

Each frame gets a posterior over the benign activities; a session's score for
an activity is the simple average of its per-second posteriors. A session
whose best average is strictly below the threshold matches no known activity
and is malicious.
"""

import logging
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from app.config import settings

from ..models.bayes import ActivityModel
from ..schemas.core import BENIGN_ACTIVITIES, ActivityLabel, ConditionFrame, Session
from ..schemas.reports import BayesVerdict, SessionScore
from ..utils.exceptions import (
    InvalidFrameException,
    InvalidTrainingDataException,
    MissingActivityException,
    ThresholdTypeException,
)

logger = logging.getLogger(__name__)


def train_bayes(sessions: Iterable[Session], alpha: float = settings.SMOOTHING_ALPHA) -> ActivityModel:
    """
    Estimate smoothed per-bit frequencies for every benign activity.

    theta[a][i] = (ones on channel i in frames of a + alpha) / (frames of a + 2 * alpha);
    priors are uniform over the activities.

    Raises:
        InvalidTrainingDataException: If alpha <= 0, a session is not benign,
            or channel widths disagree
        MissingActivityException: If any benign activity has no sessions
    """
    if alpha <= 0:
        raise InvalidTrainingDataException(f"Smoothing alpha must be positive, got {alpha}")

    ones: Dict[ActivityLabel, np.ndarray] = {}
    frames: Dict[ActivityLabel, int] = {}
    width = None

    for session in sessions:
        if not session.is_benign:
            raise InvalidTrainingDataException(
                f"Session '{session.id}' is labeled {session.label.value}; training needs benign sessions",
                {"session_id": session.id, "label": session.label.value},
            )
        if width is None:
            width = session.n_channels
        elif session.n_channels != width:
            raise InvalidTrainingDataException(
                f"Session '{session.id}' has {session.n_channels} channels, expected {width}",
                {"session_id": session.id},
            )
        bits = session.bit_matrix()
        ones[session.label] = ones.get(session.label, np.zeros(width)) + bits.sum(axis=0)
        frames[session.label] = frames.get(session.label, 0) + len(session)

    missing = [a.value for a in BENIGN_ACTIVITIES if a not in frames]
    if missing:
        raise MissingActivityException(
            f"No training sessions for activities: {', '.join(missing)}", {"missing": missing}
        )

    activities = list(BENIGN_ACTIVITIES)
    theta = np.array(
        [(ones[a] + alpha) / (frames[a] + 2 * alpha) for a in activities], dtype=np.float64
    )
    priors = np.full(len(activities), 1.0 / len(activities))
    model = ActivityModel(activities, priors, theta, alpha)
    logger.info(
        f"Trained activity model: {len(activities)} activities x {model.n_channels} channels, "
        f"{sum(frames.values())} frames, alpha={alpha}"
    )
    return model


def _check_width(model: ActivityModel, width: int) -> None:
    if width != model.n_channels:
        raise InvalidFrameException(
            f"Frame has {width} channels, model expects {model.n_channels}",
            {"width": width, "expected": model.n_channels},
        )


def log_likelihoods(model: ActivityModel, bits: np.ndarray) -> np.ndarray:
    """T x A matrix of log P(X_t | B_a)."""
    bits = np.atleast_2d(np.asarray(bits, dtype=np.float64))
    _check_width(model, bits.shape[1])
    return bits @ model.log_theta.T + (1.0 - bits) @ model.log_theta_neg.T


def posterior_matrix(model: ActivityModel, bits: np.ndarray) -> np.ndarray:
    """T x A matrix of P(B_a | X_t), normalized over activities in the log domain."""
    joint = log_likelihoods(model, bits) + model.log_priors
    joint -= joint.max(axis=1, keepdims=True)
    weights = np.exp(joint)
    return weights / weights.sum(axis=1, keepdims=True)


def frame_likelihood(model: ActivityModel, activity: ActivityLabel, frame: ConditionFrame) -> float:
    """Product over channels of theta^bit * (1 - theta)^(1 - bit)."""
    row = log_likelihoods(model, np.asarray(frame.bits))[0]
    return float(np.exp(row[model.index_of(activity)]))


def posterior(model: ActivityModel, frame: ConditionFrame) -> Dict[ActivityLabel, float]:
    """Posterior over activities for one frame; always sums to 1."""
    row = posterior_matrix(model, np.asarray(frame.bits))[0]
    return {a: float(p) for a, p in zip(model.activities, row)}


def _windows(length: int, interval: Optional[int]) -> List[Tuple[int, int]]:
    if interval is None or interval >= length:
        return [(0, length)]
    if interval < 1:
        raise ValueError(f"interval must be positive, got {interval}")
    return [(start, min(start + interval, length)) for start in range(0, length, interval)]


def _score_rows(model: ActivityModel, rows: np.ndarray) -> SessionScore:
    expected = rows.mean(axis=0)
    best = int(np.argmax(expected))
    return SessionScore(
        per_second_posteriors=[
            {a: float(p) for a, p in zip(model.activities, row)} for row in rows
        ],
        expected_values={a: float(v) for a, v in zip(model.activities, expected)},
        best_activity=model.activities[best],
        best_value=min(1.0, float(expected[best])),
    )


def score_session_bayes(model: ActivityModel, session: Session) -> SessionScore:
    """Per-second posteriors and their simple average over the whole session."""
    return _score_rows(model, posterior_matrix(model, session.bit_matrix()))


def score_windows(
    model: ActivityModel, session: Session, interval: Optional[int] = None
) -> List[SessionScore]:
    """Scores over consecutive windows of interval seconds; None scores the whole session."""
    rows = posterior_matrix(model, session.bit_matrix())
    return [_score_rows(model, rows[start:end]) for start, end in _windows(len(rows), interval)]


def weakest_window(
    model: ActivityModel, session: Session, interval: Optional[int] = None
) -> Tuple[int, ActivityLabel, float]:
    """(window index, best activity, best expected value) of the lowest-scoring window."""
    rows = posterior_matrix(model, session.bit_matrix())
    result = None
    for index, (start, end) in enumerate(_windows(len(rows), interval)):
        expected = rows[start:end].mean(axis=0)
        best = int(np.argmax(expected))
        value = min(1.0, float(expected[best]))
        if result is None or value < result[2]:
            result = (index, model.activities[best], value)
    return result


def classify_session(
    model: ActivityModel, session: Session, threshold: float, interval: Optional[int] = None
) -> BayesVerdict:
    """
    Malicious iff the best expected value is strictly below the threshold.

    With an interval, every window is checked and the weakest one decides.

    Raises:
        ThresholdTypeException: If threshold is outside (0, 1)
    """
    if not 0 < threshold < 1:
        raise ThresholdTypeException(
            f"Naive Bayes threshold must lie in (0, 1), got {threshold}", {"threshold": threshold}
        )
    index, activity, value = weakest_window(model, session, interval)
    return BayesVerdict(
        is_malicious=value < threshold,
        best_activity=activity,
        best_value=value,
        threshold_used=threshold,
        window_index=index,
    )
