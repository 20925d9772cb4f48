"""
Pydantic schema of the persisted model document (JSON).
"""

from typing import List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, Field, model_validator

from .core import ActivityLabel, SensorChannel


class MarkovPayload(BaseModel):
    """Sparse transition counts stored as (from, to, count) triples."""

    kind: Literal["markov"] = "markov"
    n_sensors: int = Field(..., ge=1)
    transitions: List[Tuple[int, int, int]]
    row_totals: List[Tuple[int, int]]
    initial_distribution: Optional[List[Tuple[int, float]]] = None

    @model_validator(mode="after")
    def validate_counts(self):
        limit = 2**self.n_sensors
        totals = {}
        for src, dst, count in self.transitions:
            if not (0 <= src < limit and 0 <= dst < limit) or count <= 0:
                raise ValueError(f"Invalid transition ({src}, {dst}, {count})")
            totals[src] = totals.get(src, 0) + count
        if totals != dict(self.row_totals):
            raise ValueError("Row totals do not match transition counts")
        if self.initial_distribution is not None:
            mass = sum(q for _, q in self.initial_distribution)
            if abs(mass - 1.0) > 1e-9:
                raise ValueError(f"Initial distribution sums to {mass}, expected 1")
        return self


class BayesPayload(BaseModel):
    """Priors, smoothed theta matrix and the smoothing constant."""

    kind: Literal["bayes"] = "bayes"
    activities: List[ActivityLabel]
    priors: List[float]
    theta: List[List[float]]
    alpha: float = Field(..., gt=0)


class ModelFile(BaseModel):
    """Versioned model document: kind, channel catalog and kind-specific payload."""

    format_version: int
    kind: Literal["markov", "bayes"]
    catalog: List[SensorChannel]
    payload: Union[MarkovPayload, BayesPayload] = Field(..., discriminator="kind")

    @model_validator(mode="after")
    def validate_kind(self):
        if self.payload.kind != self.kind:
            raise ValueError(f"Model kind '{self.kind}' does not match payload '{self.payload.kind}'")
        return self
