"""
Tests for naive Bayes training, per-frame posteriors and session classification.
"""

import numpy as np
import pytest

from app.models.bayes import ActivityModel
from app.schemas.core import BENIGN_ACTIVITIES, ActivityLabel, ConditionFrame
from app.schemas.synth import GenConfig
from app.services.bayes import (
    classify_session,
    frame_likelihood,
    posterior,
    posterior_matrix,
    score_session_bayes,
    score_windows,
    train_bayes,
)
from app.services.synth import gen_benign
from app.utils.exceptions import (
    InvalidFrameException,
    InvalidTrainingDataException,
    MissingActivityException,
    ThresholdTypeException,
)
from tests.conftest import make_session

SLEEP = ActivityLabel.SLEEPING
BROWSE = ActivityLabel.BROWSING


@pytest.fixture
def small_model():
    """Two activities over two channels."""
    return ActivityModel([SLEEP, BROWSE], [0.5, 0.5], [[0.1, 0.2], [0.9, 0.8]], 1.0)


def frame(*bits):
    return ConditionFrame(second_index=0, bits=bits)


class TestTrainBayes:
    """Test cases for train_bayes."""

    def test_laplace_smoothing(self):
        """theta = (ones + alpha) / (frames + 2 alpha), uniform priors."""
        sessions = [make_session([[0], [0], [0], [1]], SLEEP, "sleep")]
        sessions += [
            make_session([[1], [1]], activity, activity.value)
            for activity in BENIGN_ACTIVITIES[1:]
        ]
        model = train_bayes(sessions, alpha=1.0)
        assert model.theta[model.index_of(SLEEP), 0] == pytest.approx(2 / 6)
        assert model.theta[model.index_of(BROWSE), 0] == pytest.approx(3 / 4)
        assert np.allclose(model.priors, 1 / 9)

    def test_theta_strictly_inside_unit_interval(self, bayes_model):
        assert np.all(bayes_model.theta > 0)
        assert np.all(bayes_model.theta < 1)
        assert bayes_model.theta.shape == (9, 10)

    def test_missing_activity_lists_gaps(self):
        sessions = [make_session([[0], [1]], SLEEP)]
        with pytest.raises(MissingActivityException) as exc:
            train_bayes(sessions)
        assert "PhoneCall" in exc.value.details["missing"]
        assert "Sleeping" not in exc.value.details["missing"]

    def test_rejects_non_positive_alpha(self, training_corpus):
        with pytest.raises(InvalidTrainingDataException):
            train_bayes(training_corpus, alpha=0)

    def test_rejects_malicious_sessions(self):
        with pytest.raises(InvalidTrainingDataException):
            train_bayes([make_session([[0], [1]], ActivityLabel.MALICIOUS)])


class TestPosterior:
    """Test cases for frame likelihoods and posteriors."""

    def test_frame_likelihood(self, small_model):
        assert frame_likelihood(small_model, SLEEP, frame(1, 0)) == pytest.approx(0.1 * 0.8)
        assert frame_likelihood(small_model, BROWSE, frame(1, 1)) == pytest.approx(0.72)

    def test_posterior_values(self, small_model):
        post = posterior(small_model, frame(1, 1))
        assert post[BROWSE] == pytest.approx(0.72 / 0.74)
        assert sum(post.values()) == pytest.approx(1.0, abs=1e-12)

    def test_no_underflow_with_many_channels(self):
        """Log-domain normalization survives likelihoods far below float range."""
        n = 2000
        model = ActivityModel([SLEEP, BROWSE], [0.5, 0.5], [[0.01] * n, [0.02] * n], 1.0)
        row = posterior_matrix(model, np.ones((1, n)))[0]
        assert np.isfinite(row).all()
        assert row.sum() == pytest.approx(1.0)
        assert row[1] > row[0]

    def test_width_mismatch(self, small_model):
        with pytest.raises(InvalidFrameException):
            posterior(small_model, frame(1, 0, 1))


class TestClassification:
    """Test cases for session scoring and classification."""

    def test_expected_values(self, small_model):
        session = make_session([[1, 1], [1, 1]], ActivityLabel.UNKNOWN)
        score = score_session_bayes(small_model, session)
        assert score.best_activity == BROWSE
        assert score.best_value == pytest.approx(0.72 / 0.74)
        assert len(score.per_second_posteriors) == 2
        assert sum(score.expected_values.values()) == pytest.approx(1.0)

    def test_threshold_decides(self, small_model):
        session = make_session([[1, 1], [1, 1], [1, 0]], ActivityLabel.UNKNOWN)
        value = score_session_bayes(small_model, session).best_value
        assert classify_session(small_model, session, value + 0.01).is_malicious is True
        assert classify_session(small_model, session, value - 0.01).is_malicious is False

    def test_weakest_window_decides(self, small_model):
        """With an interval the lowest-scoring window decides."""
        rows = [[1, 1]] * 4 + [[1, 0]] * 2
        session = make_session(rows, ActivityLabel.UNKNOWN)
        windows = score_windows(small_model, session, interval=4)
        assert len(windows) == 2
        assert windows[1].best_value == pytest.approx(0.18 / 0.26)

        verdict = classify_session(small_model, session, 0.7, interval=4)
        assert verdict.is_malicious is True
        assert verdict.window_index == 1
        assert classify_session(small_model, session, 0.7).is_malicious is False

    def test_whole_session_window(self, small_model):
        session = make_session([[1, 1], [0, 0], [1, 0]], ActivityLabel.UNKNOWN)
        whole = score_session_bayes(small_model, session)
        assert score_windows(small_model, session)[0].best_value == pytest.approx(whole.best_value)

    def test_threshold_must_be_probability(self, small_model):
        session = make_session([[1, 1], [1, 1]], ActivityLabel.UNKNOWN)
        with pytest.raises(ThresholdTypeException):
            classify_session(small_model, session, 3)

    def test_own_activity_wins(self, bayes_model, profiles):
        """A fresh 300-second Browsing session is recognized as Browsing."""
        session = gen_benign(profiles.profiles[BROWSE], GenConfig(seed=43, seconds=300))[0]
        score = score_session_bayes(bayes_model, session)
        assert score.best_activity == BROWSE

    def test_frame_order_does_not_matter(self, bayes_model, threat_sessions):
        """Expected values are plain averages, so shuffling frames keeps them."""
        session = threat_sessions[0]
        order = np.random.default_rng(0).permutation(len(session))
        shuffled = make_session(session.bit_matrix()[order], ActivityLabel.UNKNOWN)
        original = score_session_bayes(bayes_model, session).expected_values
        reordered = score_session_bayes(bayes_model, shuffled).expected_values
        for activity, value in original.items():
            assert reordered[activity] == pytest.approx(value, abs=1e-12)
