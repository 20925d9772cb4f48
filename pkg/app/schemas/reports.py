"""
Pydantic schemas for detector verdicts, session scores and evaluation reports.
Rates whose denominator is zero are None ("undefined"), never 0 or 1.
"""

from typing import Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .core import ActivityLabel


class MarkovVerdict(BaseModel):
    """Outcome of scoring one session against a transition model."""

    model_config = ConfigDict(frozen=True)

    is_malicious: bool
    per_transition_flags: List[int]
    max_consecutive_malicious: int = Field(..., ge=0)
    threshold_used: int = Field(..., ge=0)

    @model_validator(mode="after")
    def validate_decision(self):
        if self.is_malicious != (self.max_consecutive_malicious > self.threshold_used):
            raise ValueError("is_malicious must equal max_consecutive_malicious > threshold_used")
        return self


class SessionScore(BaseModel):
    """Per-second activity posteriors and their simple averages."""

    model_config = ConfigDict(frozen=True)

    per_second_posteriors: List[Dict[ActivityLabel, float]]
    expected_values: Dict[ActivityLabel, float]
    best_activity: ActivityLabel
    best_value: float = Field(..., ge=0, le=1)


class BayesVerdict(BaseModel):
    """Outcome of classifying one session against an activity model."""

    model_config = ConfigDict(frozen=True)

    is_malicious: bool
    best_activity: ActivityLabel
    best_value: float = Field(..., ge=0, le=1)
    threshold_used: float = Field(..., gt=0, lt=1)
    window_index: int = Field(default=0, ge=0)


class ConfusionMatrix(BaseModel):
    """Counts under the benign-positive convention (TP = benign detected benign)."""

    model_config = ConfigDict(frozen=True)

    tp: int = Field(default=0, ge=0)
    fn: int = Field(default=0, ge=0)
    tn: int = Field(default=0, ge=0)
    fp: int = Field(default=0, ge=0)

    @property
    def total(self) -> int:
        return self.tp + self.fn + self.tn + self.fp

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(
            tp=self.tp + other.tp,
            fn=self.fn + other.fn,
            tn=self.tn + other.tn,
            fp=self.fp + other.fp,
        )


class MetricsReport(BaseModel):
    """Recall, FNR, specificity ("precision rate"), FPR, accuracy, F-score."""

    model_config = ConfigDict(frozen=True)

    recall: Optional[float] = None
    fnr: Optional[float] = None
    specificity: Optional[float] = None
    fpr: Optional[float] = None
    accuracy: Optional[float] = None
    f_score: Optional[float] = None
    standard_precision: Optional[float] = None
    confusion: ConfusionMatrix


class SweepRow(BaseModel):
    """One threshold of a sweep."""

    model_config = ConfigDict(frozen=True)

    threshold: Union[int, float]
    report: MetricsReport


class CurvePoint(BaseModel):
    """A point on an ROC (x=fpr, y=tpr) or PR (x=recall, y=precision) curve."""

    model_config = ConfigDict(frozen=True)

    threshold: Optional[Union[int, float]] = None
    x: float = Field(..., ge=0, le=1)
    y: float = Field(..., ge=0, le=1)


class ComparisonRow(BaseModel):
    """One detector at its operating threshold, with area under the PR curve."""

    model_config = ConfigDict(frozen=True)

    detector: str
    threshold: Union[int, float]
    report: MetricsReport
    auprc: Optional[float] = None


class CrossValidationResult(BaseModel):
    """Per-fold sweeps plus the sweep over confusion counts pooled across folds."""

    model_config = ConfigDict(frozen=True)

    fold_rows: List[List[SweepRow]]
    pooled: List[SweepRow]
