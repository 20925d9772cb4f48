"""
Configuration settings for the Sensor Context Guard engine.
Centralizes detector defaults, sweep grids and file-format constants.
"""

import os
from pathlib import Path
from typing import List


class Settings:
    """Application settings. Only logging reads the environment."""

    # Application Settings
    APP_NAME: str = "Sensor Context Guard"
    VERSION: str = "1.0.0"
    DEBUG: bool = os.getenv("DEBUG", "False").lower() == "true"

    # Logging Settings
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")

    # Persistence Settings
    MODEL_FORMAT_VERSION: int = 1
    PROFILES_PATH: Path = Path(__file__).resolve().parent / "data" / "default_profiles.json"

    # Preprocessing Settings
    CHANGE_TOLERANCE: float = 1e-9
    LOGIC_HOLD_SECONDS: int = 5

    # Detector Settings
    SMOOTHING_ALPHA: float = 1.0
    MARKOV_THRESHOLD: int = 3
    BAYES_THRESHOLD: float = 0.60
    MARKOV_SWEEP: List[int] = [0, 1, 2, 3, 5, 6, 8, 10, 12, 15]
    BAYES_SWEEP: List[float] = [0.55, 0.57, 0.60, 0.62, 0.65, 0.67, 0.70, 0.72, 0.75, 0.80]

    # Generation / Evaluation Settings
    SESSION_SECONDS: int = 300
    DEFAULT_SEED: int = 42
    TRAIN_FRACTION: float = 0.75
    CV_FOLDS: int = 10


settings = Settings()
