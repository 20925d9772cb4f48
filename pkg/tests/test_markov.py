"""
Tests for Markov chain training, sequence probability and run-length scoring.
"""

import math

import pytest

from app.models.markov import TransitionModel
from app.schemas.core import ActivityLabel
from app.services.detectors import MarkovDetector
from app.services.markov import (
    longest_run,
    score_session_markov,
    sequence_log_probability,
    sequence_probability,
    train_markov,
    transition_flags,
    transition_prob,
)
from app.utils.exceptions import (
    InsufficientDataException,
    InvalidFrameException,
    InvalidTrainingDataException,
    MissingInitialDistributionException,
    ThresholdTypeException,
)
from tests.conftest import make_session


class TestTrainMarkov:
    """Test cases for train_markov."""

    def test_counts_and_totals(self, two_channel_sessions):
        """Transitions are counted within sessions only."""
        model = train_markov(two_channel_sessions)
        # session a: 0->1, 1->1, 1->2 ; session b: 0->0, 0->1
        assert model.count(0, 1) == 2
        assert model.count(1, 1) == 1
        assert model.count(1, 2) == 1
        assert model.count(0, 0) == 1
        assert model.count(2, 0) == 0
        assert model.row_total(0) == 3
        assert model.row_total(1) == 2
        assert model.row_total(2) == 0

    def test_probabilities(self, two_channel_sessions):
        """P(a, b) = N_ab / N_a, zero for unseen rows."""
        model = train_markov(two_channel_sessions)
        assert transition_prob(model, 0, 1) == pytest.approx(2 / 3)
        assert transition_prob(model, 1, 2) == pytest.approx(0.5)
        assert transition_prob(model, 3, 0) == 0.0
        assert transition_prob(model, 2, 0) == 0.0

    def test_initial_distribution(self, two_channel_sessions):
        """Q is the first-state frequency."""
        model = train_markov(two_channel_sessions)
        assert model.initial_distribution == {0: 1.0}

    def test_rejects_malicious_sessions(self):
        with pytest.raises(InvalidTrainingDataException):
            train_markov([make_session([[0], [1]], ActivityLabel.MALICIOUS)])

    def test_rejects_short_sessions(self):
        with pytest.raises(InvalidTrainingDataException):
            train_markov([make_session([[0]])])

    def test_rejects_mixed_widths(self):
        with pytest.raises(InvalidTrainingDataException):
            train_markov([make_session([[0], [1]]), make_session([[0, 0], [1, 0]], session_id="w")])

    def test_empty_corpus(self):
        with pytest.raises(InsufficientDataException):
            train_markov([])

    def test_rows_are_stochastic(self, markov_model):
        """Every observed row sums to 1."""
        for src in markov_model.row_totals:
            assert abs(sum(markov_model.row(src).values()) - 1.0) < 1e-9


class TestSequenceProbability:
    """Test cases for sequence_probability and its log form."""

    def test_product(self, two_channel_sessions):
        model = train_markov(two_channel_sessions)
        assert sequence_probability(model, [0, 1, 2]) == pytest.approx(1.0 * (2 / 3) * 0.5)
        assert sequence_probability(model, [0]) == 1.0
        assert sequence_probability(model, [1, 1]) == 0.0

    def test_log_form(self, two_channel_sessions):
        model = train_markov(two_channel_sessions)
        assert sequence_log_probability(model, [0, 1, 2]) == pytest.approx(math.log(1 / 3))
        assert sequence_log_probability(model, [0, 2]) == -math.inf

    def test_requires_initial_distribution(self):
        model = TransitionModel(1, {(0, 1): 1})
        with pytest.raises(MissingInitialDistributionException):
            sequence_probability(model, [0, 1])

    def test_requires_states(self, two_channel_sessions):
        model = train_markov(two_channel_sessions)
        with pytest.raises(InsufficientDataException):
            sequence_probability(model, [])


class TestScoring:
    """Test cases for run-length scoring."""

    def test_longest_run(self):
        assert longest_run([]) == 0
        assert longest_run([0, 1, 1, 0, 1, 1, 1, 0]) == 3

    def test_flags(self, two_channel_sessions):
        model = train_markov(two_channel_sessions)
        assert transition_flags(model, [0, 1, 3, 3, 2]) == [0, 1, 1, 1]

    def test_threshold_boundary(self, two_channel_sessions):
        """Malicious iff the longest run is strictly greater than the threshold."""
        model = train_markov(two_channel_sessions)
        session = make_session([[0, 0], [1, 0], [1, 1], [1, 1], [0, 1]], ActivityLabel.UNKNOWN)
        assert score_session_markov(model, session, 3).is_malicious is False
        verdict = score_session_markov(model, session, 2)
        assert verdict.is_malicious is True
        assert verdict.max_consecutive_malicious == 3
        assert verdict.per_transition_flags == [0, 1, 1, 1]

    def test_threshold_zero_flags_any_unseen(self, two_channel_sessions):
        model = train_markov(two_channel_sessions)
        session = make_session([[0, 0], [1, 0], [0, 0]], ActivityLabel.UNKNOWN)
        assert score_session_markov(model, session, 0).is_malicious is True

    def test_short_session(self, two_channel_sessions):
        model = train_markov(two_channel_sessions)
        with pytest.raises(InsufficientDataException):
            score_session_markov(model, make_session([[0, 0]]), 3)

    def test_width_must_match_model(self, two_channel_sessions):
        """A session from another state space is rejected, not scored."""
        model = train_markov(two_channel_sessions)
        wide = make_session([[0, 0, 0], [1, 0, 1], [1, 1, 1]], ActivityLabel.UNKNOWN)
        with pytest.raises(InvalidFrameException):
            score_session_markov(model, wide, 3)
        with pytest.raises(InvalidFrameException):
            MarkovDetector(model).score(wide)

    def test_negative_threshold(self, two_channel_sessions):
        model = train_markov(two_channel_sessions)
        session = make_session([[0, 0], [1, 0]], ActivityLabel.UNKNOWN)
        with pytest.raises(ThresholdTypeException):
            score_session_markov(model, session, -1)
