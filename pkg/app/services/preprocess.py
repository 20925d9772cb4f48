"""
Conversion of multi-rate raw sensor traces into per-second condition frames.

Data channels are averaged per second and marked 1 when the mean moved by more
than the change tolerance since the previous second. Logic channels arrive as
low-rate on/off samples and are held for the sampling window.
"""

import logging
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from app.config import settings

from ..schemas.core import ActivityLabel, SensorCatalog, Session
from ..schemas.preprocess import PreprocessConfig, RawReading
from ..utils.exceptions import (
    EmptyTraceException,
    FileFormatException,
    InsufficientDataException,
    UnknownChannelException,
)

logger = logging.getLogger(__name__)

RAW_COLUMNS = ["timestamp_ms", "channel", "value"]


def _readings_frame(readings: Union[pd.DataFrame, Sequence[RawReading]]) -> pd.DataFrame:
    if isinstance(readings, pd.DataFrame):
        missing = set(RAW_COLUMNS) - set(readings.columns)
        if missing:
            raise FileFormatException(
                f"Raw trace is missing columns: {sorted(missing)}", {"columns": list(readings.columns)}
            )
        return readings[RAW_COLUMNS]
    return pd.DataFrame(
        [(r.timestamp_ms, r.channel, r.value) for r in readings], columns=RAW_COLUMNS
    )


def _per_second_means(frame: pd.DataFrame) -> pd.Series:
    seconds = frame["timestamp_ms"].astype(np.int64) // 1000
    return frame["value"].astype(float).groupby(seconds).mean()


def average_per_second(
    readings: Sequence[RawReading], total_seconds: Optional[int] = None
) -> List[Tuple[int, Optional[float]]]:
    """
    Average one data channel's readings per second.

    Args:
        readings: Readings of a single channel
        total_seconds: Cover seconds 0..total_seconds-1; by default the span
            from the first to the last covered second

    Returns:
        (second_index, mean) pairs; seconds without readings carry None
    """
    frame = _readings_frame(readings)
    if frame.empty:
        return [(s, None) for s in range(total_seconds or 0)]

    means = _per_second_means(frame)
    if total_seconds is None:
        index = range(int(means.index.min()), int(means.index.max()) + 1)
    else:
        index = range(total_seconds)
    means = means.reindex(index)
    return [(int(s), None if pd.isna(m) else float(m)) for s, m in means.items()]


def condition_from_averages(prev_mean: float, cur_mean: float, tolerance: float) -> int:
    """1 iff the per-second mean moved by more than tolerance, else 0."""
    if tolerance < 0:
        raise ValueError(f"tolerance must be non-negative, got {tolerance}")
    return int(abs(cur_mean - prev_mean) > tolerance)


def expand_logic_samples(
    samples: Sequence[Tuple[int, int]],
    total_seconds: int,
    hold_seconds: int = settings.LOGIC_HOLD_SECONDS,
    channel: str = "logic",
) -> List[int]:
    """
    Replicate each low-rate logic sample over the following hold window.

    Seconds not covered by any sample are 0 (sensor off) and logged as a warning.
    """
    out = np.zeros(total_seconds, dtype=np.uint8)
    covered = np.zeros(total_seconds, dtype=bool)
    for second, bit in sorted(samples):
        if second >= total_seconds:
            continue
        out[second : second + hold_seconds] = bit
        covered[second : second + hold_seconds] = True

    uncovered = int((~covered).sum())
    if uncovered:
        logger.warning(
            f"Logic channel '{channel}': {uncovered} of {total_seconds} seconds have no sample, "
            f"filled with 0"
        )
    return out.tolist()


def build_session(
    raw: Union[pd.DataFrame, Sequence[RawReading]],
    catalog: SensorCatalog,
    config: PreprocessConfig,
    label: ActivityLabel,
    session_id: str = "session",
) -> Session:
    """
    Merge a full raw trace into one frame per second.

    Frame s carries, for each data channel, condition_from_averages(mean(s-1), mean(s))
    and, for each logic channel, the held sample value. Frame 0 data bits are 0.
    Seconds with no data readings inherit the previous mean (condition 0).

    A trace lasts until the end of the second holding its last reading, so the
    frame count is max(timestamp_ms) // 1000 + 1: readings at 0 and 3000 ms give
    frames 0..3, and a 300 s trace sampled up to 299999 ms gives 300 frames.

    Raises:
        EmptyTraceException: If the trace has no readings
        UnknownChannelException: If a reading names a channel outside the catalog
        InsufficientDataException: If the trace covers fewer than 2 seconds
    """
    frame = _readings_frame(raw)
    if frame.empty:
        raise EmptyTraceException("Raw trace contains no readings")

    unknown = sorted(set(frame["channel"]) - set(catalog.names))
    if unknown:
        raise UnknownChannelException(
            f"Unknown channel '{unknown[0]}' in raw trace", {"channels": unknown}
        )
    if (frame["timestamp_ms"] < 0).any():
        raise FileFormatException("Raw trace contains negative timestamps")

    seconds = frame["timestamp_ms"].astype(np.int64) // 1000
    total_seconds = int(seconds.max()) + 1
    if total_seconds < 2:
        raise InsufficientDataException(
            f"Raw trace covers {total_seconds} second(s), at least 2 required",
            {"seconds": total_seconds},
        )

    bits = np.zeros((total_seconds, catalog.size), dtype=np.uint8)
    grouped = dict(tuple(frame.groupby("channel")))

    for channel in catalog.data_channels():
        readings = grouped.get(channel.name)
        if readings is None:
            logger.warning(f"Data channel '{channel.name}' has no readings, conditions set to 0")
            continue
        means = _per_second_means(readings).reindex(range(total_seconds))
        gaps = int(means.isna().sum())
        if gaps:
            logger.warning(
                f"Data channel '{channel.name}': {gaps} second(s) without readings inherit "
                f"the previous mean"
            )
        change = means.ffill().diff().abs() > config.change_tolerance
        bits[:, channel.bit] = change.to_numpy(dtype=np.uint8)

    for channel in catalog.logic_channels():
        readings = grouped.get(channel.name)
        if readings is None:
            samples: List[Tuple[int, int]] = []
        else:
            values = readings["value"].astype(float)
            if not values.isin([0.0, 1.0]).all():
                raise FileFormatException(
                    f"Logic channel '{channel.name}' has values outside {{0, 1}}",
                    {"channel": channel.name},
                )
            last = values.groupby(readings["timestamp_ms"].astype(np.int64) // 1000).last()
            samples = [(int(s), int(v)) for s, v in last.items()]
        bits[:, channel.bit] = expand_logic_samples(
            samples, total_seconds, config.logic_hold_seconds, channel=channel.name
        )

    session = Session.from_bits(session_id, bits, label)
    logger.info(f"Built session '{session_id}' with {len(session)} frames from {len(frame)} readings")
    return session
