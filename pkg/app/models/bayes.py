"""
Per-activity Bernoulli model over condition bits.
"""

from typing import List, Sequence

import numpy as np

from app.schemas.core import ActivityLabel


class ActivityModel:
    """Priors P(B_i) and smoothed per-bit probabilities theta[a][i] = P(bit_i = 1 | a)."""

    kind = "bayes"

    def __init__(
        self,
        activities: Sequence[ActivityLabel],
        priors: Sequence[float],
        theta: "np.ndarray | Sequence[Sequence[float]]",
        smoothing_alpha: float,
    ):
        self.activities: List[ActivityLabel] = list(activities)
        self.priors = np.asarray(priors, dtype=np.float64)
        self.theta = np.asarray(theta, dtype=np.float64)
        self.smoothing_alpha = float(smoothing_alpha)

        if self.theta.ndim != 2 or self.theta.shape[0] != len(self.activities):
            raise ValueError(
                f"theta must be {len(self.activities)} x n, got shape {self.theta.shape}"
            )
        if self.priors.shape != (len(self.activities),):
            raise ValueError("priors must have one entry per activity")
        if abs(self.priors.sum() - 1.0) > 1e-9:
            raise ValueError(f"priors must sum to 1, got {self.priors.sum()}")
        if np.any(self.theta <= 0) or np.any(self.theta >= 1):
            raise ValueError("theta entries must lie strictly inside (0, 1)")
        if self.smoothing_alpha <= 0:
            raise ValueError("smoothing_alpha must be positive")

        self.log_priors = np.log(self.priors)
        self.log_theta = np.log(self.theta)
        self.log_theta_neg = np.log1p(-self.theta)

    def __repr__(self):
        return (
            f"<ActivityModel(activities={len(self.activities)}, "
            f"channels={self.n_channels}, alpha={self.smoothing_alpha})>"
        )

    @property
    def n_channels(self) -> int:
        return self.theta.shape[1]

    def index_of(self, activity: ActivityLabel) -> int:
        return self.activities.index(activity)
