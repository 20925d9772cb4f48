"""
Pluggable detector interface.

A detector reduces a session to one score and decides maliciousness by
comparing that score with a threshold, so sweeps score every session once.
"""

from typing import Optional, Protocol, Union

from ..models.bayes import ActivityModel
from ..models.markov import TransitionModel
from ..schemas.core import Session
from ..utils.exceptions import ModelFormatException, ThresholdTypeException
from .bayes import weakest_window
from .markov import longest_run, session_states, transition_flags

Threshold = Union[int, float]


class Detector(Protocol):
    """Scores sessions and turns scores into verdicts."""

    kind: str

    def score(self, session: Session) -> float:
        ...

    def decide(self, score: float, threshold: Threshold) -> bool:
        ...

    @staticmethod
    def parse_threshold(text: str) -> Threshold:
        ...

    @staticmethod
    def validate_threshold(threshold: Threshold) -> Threshold:
        ...

    def is_malicious(self, session: Session, threshold: Threshold) -> bool:
        ...


class MarkovDetector:
    """Score = longest run of unseen transitions; malicious iff score > threshold."""

    kind = "markov"

    def __init__(self, model: TransitionModel):
        self.model = model

    def score(self, session: Session) -> float:
        return float(longest_run(transition_flags(self.model, session_states(self.model, session))))

    def decide(self, score: float, threshold: Threshold) -> bool:
        return score > threshold

    @staticmethod
    def validate_threshold(threshold: Threshold) -> int:
        if isinstance(threshold, bool) or not float(threshold).is_integer() or threshold < 0:
            raise ThresholdTypeException(
                f"Markov threshold must be a non-negative integer run length, got {threshold}",
                {"threshold": threshold},
            )
        return int(threshold)

    @staticmethod
    def parse_threshold(text: str) -> int:
        try:
            value = int(text)
        except ValueError:
            raise ThresholdTypeException(
                f"Markov threshold must be a non-negative integer run length, got '{text}'",
                {"threshold": text},
            )
        return MarkovDetector.validate_threshold(value)

    def is_malicious(self, session: Session, threshold: Threshold) -> bool:
        return self.decide(self.score(session), self.validate_threshold(threshold))


class BayesDetector:
    """Score = best expected value of the weakest window; malicious iff score < threshold."""

    kind = "bayes"

    def __init__(self, model: ActivityModel, interval: Optional[int] = None):
        self.model = model
        self.interval = interval

    def score(self, session: Session) -> float:
        return weakest_window(self.model, session, self.interval)[2]

    def decide(self, score: float, threshold: Threshold) -> bool:
        return score < threshold

    @staticmethod
    def validate_threshold(threshold: Threshold) -> float:
        if isinstance(threshold, bool) or not 0 < threshold < 1:
            raise ThresholdTypeException(
                f"Naive Bayes threshold must be a probability in (0, 1), got {threshold}",
                {"threshold": threshold},
            )
        return float(threshold)

    @staticmethod
    def parse_threshold(text: str) -> float:
        try:
            value = float(text)
        except ValueError:
            raise ThresholdTypeException(
                f"Naive Bayes threshold must be a probability in (0, 1), got '{text}'",
                {"threshold": text},
            )
        return BayesDetector.validate_threshold(value)

    def is_malicious(self, session: Session, threshold: Threshold) -> bool:
        return self.decide(self.score(session), self.validate_threshold(threshold))


def build_detector(
    model: Union[TransitionModel, ActivityModel], interval: Optional[int] = None
) -> Detector:
    """Wrap a trained model in the detector for its kind."""
    if isinstance(model, TransitionModel):
        return MarkovDetector(model)
    if isinstance(model, ActivityModel):
        return BayesDetector(model, interval)
    raise ModelFormatException(f"No detector for model type {type(model).__name__}")
