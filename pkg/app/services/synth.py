"""
Seeded generator of benign activity sessions and the three threat scenarios.

Every condition bit follows its own two-state chain (p_on from 0, p_off from 1),
which gives sessions the temporal persistence the Markov detector keys on.
Threat sessions start from an idle (Sleeping) baseline, go fully quiet for a
5-10 s lead-in, and then run the attack pattern to the end of the session:

  1. light-triggered App: light bit pulses every second, everything else off
  2. audio leak: microphone and speaker on outside any call context
  3. covert video: camera and microphone recording while the phone lies still

The attack share of each scenario comes from the profile table. Attack frames
match no benign transition and pull activity posteriors away from Sleeping.
With the attack channels silenced a session is plain idle.
"""

import json
import logging
from functools import lru_cache
from pathlib import Path
from typing import List, Optional

import numpy as np

from app.config import settings

from ..schemas.core import BENIGN_ACTIVITIES, ActivityLabel, SensorCatalog, Session
from ..schemas.synth import ActivityProfile, GenConfig, ProfileBook
from ..utils.exceptions import InvalidGenConfigException, UnknownScenarioException

logger = logging.getLogger(__name__)

THREAT_SCENARIOS = (1, 2, 3)
MIN_THREAT_SECONDS = 40
_THREAT_STREAM = 100


def load_profiles(path: Optional[Path] = None) -> ProfileBook:
    """Load and validate a versioned profile table."""
    path = Path(path) if path is not None else settings.PROFILES_PATH
    if path == settings.PROFILES_PATH:
        return _default_profiles()
    return ProfileBook.model_validate(json.loads(path.read_text()))


@lru_cache(maxsize=1)
def _default_profiles() -> ProfileBook:
    book = ProfileBook.model_validate(json.loads(settings.PROFILES_PATH.read_text()))
    logger.info(f"Loaded default profiles v{book.version} from {settings.PROFILES_PATH.name}")
    return book


def session_rng(seed: int, stream: int, index: int) -> np.random.Generator:
    """Independent generator per (seed, stream, session index)."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(stream, index)))


def simulate_chains(
    profile: ActivityProfile, length: int, rng: np.random.Generator, catalog: SensorCatalog
) -> np.ndarray:
    """length x n bit matrix; the first frame is drawn from each chain's stationary state."""
    unknown = sorted(set(profile.channels) - set(catalog.names))
    if unknown:
        raise InvalidGenConfigException(
            f"Profile '{profile.label.value}' names channels outside the catalog: {unknown}"
        )
    p_on = np.array([profile.channel(c.name).p_on for c in catalog.channels])
    p_off = np.array([profile.channel(c.name).p_off for c in catalog.channels])
    start = np.array([profile.channel(c.name).stationary_on for c in catalog.channels])

    bits = np.zeros((length, catalog.size), dtype=np.uint8)
    if length == 0:
        return bits
    state = rng.random(catalog.size) < start
    bits[0] = state
    for t in range(1, length):
        u = rng.random(catalog.size)
        state = np.where(state, u >= p_off, u < p_on)
        bits[t] = state
    return bits


def gen_benign(
    profile: ActivityProfile,
    config: GenConfig,
    catalog: SensorCatalog = SensorCatalog.default(),
) -> List[Session]:
    """Generate config.sessions sessions of one benign activity."""
    stream = BENIGN_ACTIVITIES.index(profile.label)
    sessions = [
        Session.from_bits(
            f"{profile.label.value}-s{config.seed}-{index:04d}",
            simulate_chains(profile, config.seconds, session_rng(config.seed, stream, index), catalog),
            profile.label,
        )
        for index in range(config.sessions)
    ]
    logger.info(
        f"Generated {len(sessions)} {profile.label.value} sessions of {config.seconds}s (seed {config.seed})"
    )
    return sessions


def _threat_bits(
    scenario: int,
    seconds: int,
    rng: np.random.Generator,
    profiles: ProfileBook,
    catalog: SensorCatalog,
) -> np.ndarray:
    share = profiles.threats[str(scenario)]
    idle = profiles.profiles[ActivityLabel.SLEEPING]

    lead = int(rng.integers(5, 11))
    min_attack = 10 if scenario == 1 else 5
    attack_len = int(round(seconds * rng.uniform(share.share_min, share.share_max)))
    attack_len = max(min_attack, min(attack_len, seconds - lead))
    start = seconds - attack_len

    bits = simulate_chains(idle, seconds, rng, catalog)
    bits[max(0, start - lead) :] = 0

    try:
        if scenario == 1:
            light = catalog.channel("light").bit
            bits[start:, light] = (np.arange(attack_len) % 2 == 0).astype(np.uint8)
        elif scenario == 2:
            bits[start:, catalog.channel("microphone").bit] = 1
            bits[start:, catalog.channel("speaker").bit] = 1
        else:
            bits[start:, catalog.channel("camera").bit] = 1
            bits[start:, catalog.channel("microphone").bit] = 1
    except KeyError as e:
        raise InvalidGenConfigException(
            f"Threat {scenario} needs channel {e} in the catalog", {"scenario": scenario}
        )
    return bits


def gen_threat(
    scenario: int,
    config: GenConfig,
    profiles: Optional[ProfileBook] = None,
    catalog: SensorCatalog = SensorCatalog.default(),
) -> List[Session]:
    """
    Generate config.sessions malicious sessions for one threat scenario.

    Raises:
        UnknownScenarioException: If scenario is not 1, 2 or 3
        InvalidGenConfigException: If sessions are shorter than MIN_THREAT_SECONDS
    """
    if scenario not in THREAT_SCENARIOS:
        raise UnknownScenarioException(
            f"Unknown threat scenario {scenario}; expected one of {list(THREAT_SCENARIOS)}",
            {"scenario": scenario},
        )
    if config.seconds < MIN_THREAT_SECONDS:
        raise InvalidGenConfigException(
            f"Threat sessions need at least {MIN_THREAT_SECONDS} seconds, got {config.seconds}",
            {"seconds": config.seconds},
        )
    profiles = profiles or load_profiles()

    sessions = [
        Session.from_bits(
            f"threat{scenario}-s{config.seed}-{index:04d}",
            _threat_bits(
                scenario,
                config.seconds,
                session_rng(config.seed, _THREAT_STREAM + scenario, index),
                profiles,
                catalog,
            ),
            ActivityLabel.MALICIOUS,
        )
        for index in range(config.sessions)
    ]
    logger.info(f"Generated {len(sessions)} threat-{scenario} sessions (seed {config.seed})")
    return sessions


def gen_corpus(
    config: GenConfig,
    profiles: Optional[ProfileBook] = None,
    catalog: SensorCatalog = SensorCatalog.default(),
) -> List[Session]:
    """config.sessions benign sessions for every activity, in benign activity order."""
    profiles = profiles or load_profiles()
    corpus: List[Session] = []
    for activity in BENIGN_ACTIVITIES:
        corpus.extend(gen_benign(profiles.profiles[activity], config, catalog))
    return corpus
