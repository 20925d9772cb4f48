"""
Pydantic schemas for raw sensor readings and preprocessing parameters.
"""

from pydantic import BaseModel, ConfigDict, Field

from app.config import settings


class RawReading(BaseModel):
    """One raw sample from the collection trace."""

    model_config = ConfigDict(frozen=True)

    timestamp_ms: int = Field(..., ge=0)
    channel: str = Field(..., min_length=1)
    value: float


class PreprocessConfig(BaseModel):
    """Change tolerance for data channels and hold window for logic samples."""

    model_config = ConfigDict(frozen=True)

    change_tolerance: float = Field(default=settings.CHANGE_TOLERANCE, ge=0)
    logic_hold_seconds: int = Field(default=settings.LOGIC_HOLD_SECONDS, ge=1)
