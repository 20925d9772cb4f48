"""
Sparse transition model over device states.
Counts are keyed by (from_state, to_state); the dense 2^n x 2^n matrix is never built.
"""

from collections import Counter
from typing import Dict, Iterator, Mapping, Optional, Tuple


class TransitionModel:
    """Transition counts N_ij, row totals N_i and an optional initial distribution Q."""

    kind = "markov"

    def __init__(
        self,
        n_sensors: int,
        counts: Mapping[Tuple[int, int], int],
        initial_distribution: Optional[Mapping[int, float]] = None,
    ):
        if n_sensors < 1:
            raise ValueError(f"n_sensors must be positive, got {n_sensors}")
        self.n_sensors = n_sensors
        self._counts: Dict[Tuple[int, int], int] = {k: int(v) for k, v in counts.items() if v > 0}
        totals: Counter = Counter()
        for (src, _), count in self._counts.items():
            totals[src] += count
        self._row_totals: Dict[int, int] = dict(totals)
        self.initial_distribution: Optional[Dict[int, float]] = (
            dict(initial_distribution) if initial_distribution is not None else None
        )

    def __repr__(self):
        return (
            f"<TransitionModel(n_sensors={self.n_sensors}, transitions={len(self._counts)}, "
            f"rows={len(self._row_totals)})>"
        )

    @property
    def state_count(self) -> int:
        return 2**self.n_sensors

    @property
    def counts(self) -> Dict[Tuple[int, int], int]:
        return dict(self._counts)

    @property
    def row_totals(self) -> Dict[int, int]:
        return dict(self._row_totals)

    @property
    def states_observed(self) -> int:
        """Distinct states appearing on either side of a counted transition."""
        seen = set()
        for src, dst in self._counts:
            seen.add(src)
            seen.add(dst)
        return len(seen)

    def count(self, src: int, dst: int) -> int:
        return self._counts.get((src, dst), 0)

    def row_total(self, src: int) -> int:
        return self._row_totals.get(src, 0)

    def probability(self, src: int, dst: int) -> float:
        """P_ij = N_ij / N_i, 0 when either count is zero."""
        total = self._row_totals.get(src, 0)
        if total == 0:
            return 0.0
        return self._counts.get((src, dst), 0) / total

    def row(self, src: int) -> Dict[int, float]:
        """Non-zero transition probabilities out of one state."""
        total = self._row_totals.get(src, 0)
        return {dst: c / total for (s, dst), c in self._counts.items() if s == src}

    def transitions(self) -> Iterator[Tuple[int, int, int]]:
        """(from, to, count) triples in sorted order."""
        for (src, dst) in sorted(self._counts):
            yield src, dst, self._counts[(src, dst)]
