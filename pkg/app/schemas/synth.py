"""
Pydantic schemas for the synthetic workload generator: per-channel
two-state chains, activity profiles, threat scenarios and run configuration.
"""

from typing import Dict, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.config import settings

from .core import BENIGN_ACTIVITIES, ActivityLabel


class ChannelProfile(BaseModel):
    """Two-state chain for one condition bit."""

    model_config = ConfigDict(frozen=True)

    p_on: float = Field(default=0.0, ge=0, le=1)
    p_off: float = Field(default=1.0, ge=0, le=1)

    @property
    def stationary_on(self) -> float:
        """Long-run probability the bit is 1; used for the first frame."""
        total = self.p_on + self.p_off
        return self.p_on / total if total > 0 else 0.0


class ActivityProfile(BaseModel):
    """Per-channel chains for one benign activity; omitted channels stay off."""

    model_config = ConfigDict(frozen=True)

    label: ActivityLabel
    channels: Dict[str, ChannelProfile] = Field(default_factory=dict)

    @field_validator("label")
    @classmethod
    def validate_benign(cls, v):
        if not v.is_benign:
            raise ValueError(f"Profiles describe benign activities only, got {v.value}")
        return v

    def channel(self, name: str) -> ChannelProfile:
        return self.channels.get(name, ChannelProfile())


class ThreatProfile(BaseModel):
    """Share of a threat session, drawn uniformly from [share_min, share_max], taken by the attack."""

    model_config = ConfigDict(frozen=True)

    share_min: float = Field(..., gt=0, le=1)
    share_max: float = Field(..., gt=0, le=1)

    @model_validator(mode="after")
    def validate_range(self):
        if self.share_min > self.share_max:
            raise ValueError(f"share_min {self.share_min} exceeds share_max {self.share_max}")
        return self


class ProfileBook(BaseModel):
    """Versioned profile table shipped in app/data/default_profiles.json."""

    model_config = ConfigDict(frozen=True)

    version: int = Field(..., ge=1)
    profiles: Dict[ActivityLabel, ActivityProfile]
    threats: Dict[Literal["1", "2", "3"], ThreatProfile]

    @model_validator(mode="after")
    def validate_coverage(self):
        missing = [a.value for a in BENIGN_ACTIVITIES if a not in self.profiles]
        if missing:
            raise ValueError(f"Profile table is missing activities: {missing}")
        for key, profile in self.profiles.items():
            if profile.label != key:
                raise ValueError(f"Profile keyed '{key.value}' is labeled '{profile.label.value}'")
        if sorted(self.threats) != ["1", "2", "3"]:
            raise ValueError("Profile table must describe threats 1, 2 and 3")
        return self


class GenConfig(BaseModel):
    """Seed, session length and session count for one generation run."""

    model_config = ConfigDict(frozen=True)

    seed: int = Field(default=settings.DEFAULT_SEED, ge=0, lt=2**64)
    seconds: int = Field(default=settings.SESSION_SECONDS, ge=2)
    sessions: int = Field(default=1, ge=1)
