"""
Bijection between condition frames and integer state ids.
Bit i of a frame occupies the 2^i place (LSB-first), so channel index equals bit position.
"""

from typing import Sequence, Tuple

from app.schemas.core import ConditionFrame

from .exceptions import StateRangeException

StateId = int


def encode_bits(bits: Sequence[int]) -> StateId:
    """Encode a bit vector as sum(bits[i] * 2^i)."""
    value = 0
    for i, bit in enumerate(bits):
        value |= int(bit) << i
    return value


def encode_state(frame: ConditionFrame) -> StateId:
    """Encode a condition frame as its state id."""
    return encode_bits(frame.bits)


def decode_state(state_id: StateId, n: int) -> Tuple[int, ...]:
    """
    Decode a state id into n condition bits.

    Raises:
        StateRangeException: If state_id is outside [0, 2^n)
    """
    if n < 1:
        raise StateRangeException(f"Channel count must be positive, got {n}", {"n": n})
    if not 0 <= state_id < (1 << n):
        raise StateRangeException(
            f"State id {state_id} outside [0, {1 << n})", {"state_id": state_id, "n": n}
        )
    return tuple((state_id >> i) & 1 for i in range(n))
