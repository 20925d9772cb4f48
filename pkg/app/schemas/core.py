"""
Pydantic value types shared by every module: the sensor catalog,
per-second condition frames, labeled sessions and activity labels.
"""

from enum import Enum
from typing import List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class ChannelKind(str, Enum):
    """Enumeration for sensor channel kinds."""

    DATA = "data"
    LOGIC = "logic"


class ActivityLabel(str, Enum):
    """Enumeration for session ground-truth labels."""

    SLEEPING = "Sleeping"
    DRIVING_DRIVER = "DrivingDriver"
    DRIVING_PASSENGER = "DrivingPassenger"
    WALKING_HAND = "WalkingHand"
    WALKING_POCKET = "WalkingPocket"
    PLAYING_GAMES = "PlayingGames"
    BROWSING = "Browsing"
    PHONE_CALL = "PhoneCall"
    VIDEO_CALL = "VideoCall"
    MALICIOUS = "Malicious"
    UNKNOWN = "Unknown"

    @property
    def is_benign(self) -> bool:
        return self in BENIGN_ACTIVITIES


BENIGN_ACTIVITIES: Tuple[ActivityLabel, ...] = (
    ActivityLabel.SLEEPING,
    ActivityLabel.DRIVING_DRIVER,
    ActivityLabel.DRIVING_PASSENGER,
    ActivityLabel.WALKING_HAND,
    ActivityLabel.WALKING_POCKET,
    ActivityLabel.PLAYING_GAMES,
    ActivityLabel.BROWSING,
    ActivityLabel.PHONE_CALL,
    ActivityLabel.VIDEO_CALL,
)


class SensorChannel(BaseModel):
    """One condition channel: catalog name, frames-CSV column, kind and bit position."""

    model_config = ConfigDict(frozen=True)

    name: str = Field(..., min_length=1)
    column: str = Field(..., min_length=1)
    kind: ChannelKind
    bit: int = Field(..., ge=0)


class SensorCatalog(BaseModel):
    """Ordered channel list; channel i occupies the 2^i place of a state id."""

    model_config = ConfigDict(frozen=True)

    channels: Tuple[SensorChannel, ...]

    @field_validator("channels")
    @classmethod
    def validate_channels(cls, v):
        if not v:
            raise ValueError("Catalog must contain at least one channel")
        if [c.bit for c in v] != list(range(len(v))):
            raise ValueError("Channel bit indices must be unique and contiguous from 0")
        if len({c.name for c in v}) != len(v) or len({c.column for c in v}) != len(v):
            raise ValueError("Channel names and columns must be unique")
        return v

    @classmethod
    def default(cls) -> "SensorCatalog":
        """The standard 10-channel catalog in canonical order."""
        return DEFAULT_CATALOG

    @property
    def size(self) -> int:
        return len(self.channels)

    @property
    def names(self) -> List[str]:
        return [c.name for c in self.channels]

    @property
    def columns(self) -> List[str]:
        return [c.column for c in self.channels]

    @property
    def state_count(self) -> int:
        return 2**self.size

    @property
    def is_standard(self) -> bool:
        """True for a 10-channel catalog with 4 data and 6 logic channels."""
        kinds = [c.kind for c in self.channels]
        return (
            self.size == 10
            and kinds.count(ChannelKind.DATA) == 4
            and kinds.count(ChannelKind.LOGIC) == 6
        )

    def channel(self, name: str) -> SensorChannel:
        for c in self.channels:
            if c.name == name:
                return c
        raise KeyError(name)

    def data_channels(self) -> List[SensorChannel]:
        return [c for c in self.channels if c.kind == ChannelKind.DATA]

    def logic_channels(self) -> List[SensorChannel]:
        return [c for c in self.channels if c.kind == ChannelKind.LOGIC]


_DEFAULT_LAYOUT = [
    ("accelerometer", "acc", ChannelKind.DATA),
    ("gyroscope", "gyro", ChannelKind.DATA),
    ("light", "light", ChannelKind.DATA),
    ("proximity", "prox", ChannelKind.DATA),
    ("camera", "cam", ChannelKind.LOGIC),
    ("microphone", "mic", ChannelKind.LOGIC),
    ("speaker", "speaker", ChannelKind.LOGIC),
    ("headset", "headset", ChannelKind.LOGIC),
    ("gps_on", "gps_on", ChannelKind.LOGIC),
    ("gps_move", "gps_move", ChannelKind.LOGIC),
]

DEFAULT_CATALOG = SensorCatalog(
    channels=tuple(
        SensorChannel(name=name, column=column, kind=kind, bit=i)
        for i, (name, column, kind) in enumerate(_DEFAULT_LAYOUT)
    )
)


class ConditionFrame(BaseModel):
    """One second of device context."""

    model_config = ConfigDict(frozen=True)

    second_index: int = Field(..., ge=0)
    bits: Tuple[int, ...]

    @field_validator("bits")
    @classmethod
    def validate_bits(cls, v):
        if not v:
            raise ValueError("Frame must carry at least one condition bit")
        if any(b not in (0, 1) for b in v):
            raise ValueError(f"Condition bits must be 0 or 1, got {list(v)}")
        return v


class Session(BaseModel):
    """Ordered frame sequence with its ground-truth label."""

    model_config = ConfigDict(frozen=True)

    id: str = Field(..., min_length=1)
    frames: Tuple[ConditionFrame, ...]
    label: ActivityLabel

    @model_validator(mode="after")
    def validate_frames(self):
        if not self.frames:
            raise ValueError(f"Session '{self.id}' has no frames")
        width = len(self.frames[0].bits)
        for position, frame in enumerate(self.frames):
            if frame.second_index != position:
                raise ValueError(
                    f"Session '{self.id}': frame {position} has second_index "
                    f"{frame.second_index}, expected {position}"
                )
            if len(frame.bits) != width:
                raise ValueError(f"Session '{self.id}': frame {position} has inconsistent width")
        return self

    @classmethod
    def from_bits(
        cls, session_id: str, bits: "np.ndarray | Sequence[Sequence[int]]", label: ActivityLabel
    ) -> "Session":
        """Build a session from a T x n bit matrix; row t becomes second t."""
        rows = np.asarray(bits, dtype=np.int64).tolist()
        frames = tuple(ConditionFrame(second_index=t, bits=tuple(row)) for t, row in enumerate(rows))
        return cls(id=session_id, frames=frames, label=label)

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def n_channels(self) -> int:
        return len(self.frames[0].bits)

    @property
    def is_benign(self) -> bool:
        return self.label.is_benign

    def bit_matrix(self) -> np.ndarray:
        """T x n uint8 matrix of condition bits."""
        return np.array([f.bits for f in self.frames], dtype=np.uint8)

    def states(self) -> List[int]:
        """State id of every frame, LSB-first."""
        weights = 1 << np.arange(self.n_channels, dtype=np.int64)
        return (self.bit_matrix().astype(np.int64) @ weights).tolist()
