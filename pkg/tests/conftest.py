"""
Shared fixtures: small hand-built sessions and the pinned synthetic corpus
(seed 42, 30 training sessions per activity; 50 benign + 15 threat test sessions).
"""

import pytest

from app.schemas.core import BENIGN_ACTIVITIES, ActivityLabel, Session
from app.schemas.synth import GenConfig
from app.services.bayes import train_bayes
from app.services.markov import train_markov
from app.services.synth import gen_benign, gen_corpus, gen_threat, load_profiles

TRAIN_SEED = 42
TEST_SEED = 43


def make_session(rows, label=ActivityLabel.SLEEPING, session_id="s"):
    """Session from a list of bit rows."""
    return Session.from_bits(session_id, rows, label)


@pytest.fixture
def two_channel_sessions():
    """Benign 2-channel sessions with a known transition structure."""
    return [
        make_session([[0, 0], [1, 0], [1, 0], [0, 1]], session_id="a"),
        make_session([[0, 0], [0, 0], [1, 0]], ActivityLabel.BROWSING, session_id="b"),
    ]


@pytest.fixture(scope="session")
def profiles():
    return load_profiles()


@pytest.fixture(scope="session")
def training_corpus(profiles):
    """30 sessions x 9 activities, 300 seconds each."""
    return gen_corpus(GenConfig(seed=TRAIN_SEED, seconds=300, sessions=30), profiles)


@pytest.fixture(scope="session")
def benign_test_sessions(profiles):
    """50 benign sessions: 6 each for the first five activities, 5 for the rest."""
    sessions = []
    for i, activity in enumerate(BENIGN_ACTIVITIES):
        config = GenConfig(seed=TEST_SEED, seconds=300, sessions=6 if i < 5 else 5)
        sessions.extend(gen_benign(profiles.profiles[activity], config))
    return sessions


@pytest.fixture(scope="session")
def threat_sessions(profiles):
    """5 sessions per threat scenario."""
    config = GenConfig(seed=TRAIN_SEED, seconds=300, sessions=5)
    return [s for scenario in (1, 2, 3) for s in gen_threat(scenario, config, profiles)]


@pytest.fixture(scope="session")
def test_corpus(benign_test_sessions, threat_sessions):
    return benign_test_sessions + threat_sessions


@pytest.fixture(scope="session")
def markov_model(training_corpus):
    return train_markov(training_corpus)


@pytest.fixture(scope="session")
def bayes_model(training_corpus):
    return train_bayes(training_corpus)
