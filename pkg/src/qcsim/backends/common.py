"""Pieces shared by the state-vector and MPS backends."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np


class SimulationError(RuntimeError):
    """Raised when a circuit cannot be executed as written."""


def outcome_key(index: int, n: int) -> str:
    """Bitstring for a basis-state index; the rightmost character is qubit 0."""
    return format(int(index), f"0{n}b")


@dataclass
class SampleResult:
    """Measurement histogram of ``shots`` executions."""

    histogram: dict[str, int]
    shots: int
    seed: int | None
    n_qubits: int
    stats: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        total = sum(self.histogram.values())
        if total != self.shots:
            raise ValueError(f"histogram counts {total} != shots {self.shots}")
        self.histogram = dict(sorted(self.histogram.items()))

    @classmethod
    def from_indices(cls, indices, n: int, seed: int | None, stats: dict | None = None) -> SampleResult:
        counts = Counter(int(i) for i in indices)
        hist = {outcome_key(i, n): c for i, c in counts.items()}
        return cls(hist, int(sum(counts.values())), seed, n, stats or {})

    def counts_by_index(self) -> dict[int, int]:
        return {int(k, 2): v for k, v in self.histogram.items()}

    def probabilities(self) -> np.ndarray:
        """Empirical distribution as a dense vector over all ``2**n`` outcomes."""
        p = np.zeros(2**self.n_qubits)
        for i, c in self.counts_by_index().items():
            p[i] = c / self.shots
        return p


def draw_outcomes(probs: np.ndarray, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Inverse-CDF sampling of ``shots`` indices from a probability vector."""
    cdf = np.cumsum(probs)
    u = rng.random(shots) * cdf[-1]
    return np.minimum(np.searchsorted(cdf, u, side="right"), probs.size - 1)
