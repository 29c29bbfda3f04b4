"""Top-k outcome agreement between truncated MPS runs and exact state-vector probabilities."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from qcsim.backends.mps import mps_probabilities, mps_sample
from qcsim.backends.statevector import needs_reexecution, sv_probabilities
from qcsim.circuit.ir import Circuit
from qcsim.tensor import TruncationConfig

DEFAULT_CHIS = (64, 32, 16, 15, 14, 13, 12, 8)
VALIDATION_SHOTS = 100_000
# probabilities closer than this rank as ties and fall back to index order
TIE_DECIMALS = 12


def top_k(weights: np.ndarray | Mapping[int, float], k: int) -> list[int]:
    """Indices of the ``k`` largest weights; ties go to the smaller index."""
    if isinstance(weights, Mapping):
        items = list(weights.items())
    else:
        items = list(enumerate(np.asarray(weights).tolist()))
    items.sort(key=lambda kv: (-round(float(kv[1]), TIE_DECIMALS), kv[0]))
    return [int(i) for i, _ in items[:k]]


@dataclass
class ValidationReport:
    circuit: str
    n_qubits: int
    k: int
    shots: int | None
    seed: int | None
    reference: list[int]
    per_chi: dict[int, list[int]] = field(default_factory=dict)
    matches: dict[int, int] = field(default_factory=dict)

    def threshold(self) -> int | None:
        """Largest chi whose match count fell below ``k``, if any."""
        failing = [chi for chi, m in self.matches.items() if m < self.k]
        return max(failing) if failing else None

    def as_dict(self) -> dict:
        return {
            "circuit": self.circuit,
            "n_qubits": self.n_qubits,
            "k": self.k,
            "shots": self.shots,
            "seed": self.seed,
            "reference": self.reference,
            "per_chi": {str(c): s for c, s in self.per_chi.items()},
            "matches": {str(c): m for c, m in self.matches.items()},
            "threshold_chi": self.threshold(),
        }

    def table(self) -> str:
        """Rank-by-column text table; ``*`` marks states found in the reference."""
        chis = list(self.per_chi)
        header = ["rank", "SV(ref)"] + [f"chi={c}" for c in chis]
        rows = [header]
        ref = set(self.reference)
        for r in range(self.k):
            row = [f"#{r + 1}", str(self.reference[r])]
            for c in chis:
                states = self.per_chi[c]
                if r < len(states):
                    s = states[r]
                    row.append(f"{s}{'*' if s in ref else ' '}")
                else:
                    row.append("-")
            rows.append(row)
        rows.append(["match", str(self.k)] + [f"{self.matches[c]}/{self.k}" for c in chis])
        widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
        return "\n".join("  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in rows)


def validate_topk(
    circuit: Circuit,
    k: int = 4,
    shots: int | None = VALIDATION_SHOTS,
    chis: Sequence[int] = DEFAULT_CHIS,
    seed: int | None = 0,
    base: TruncationConfig | None = None,
) -> ValidationReport:
    """Compare the ``k`` most likely outcomes of MPS runs against the exact reference.

    Args:
        circuit: Circuit without mid-circuit measurement.
        k: Number of top states compared.
        shots: MPS shots per chi; ``None`` uses the exact MPS distribution instead.
        chis: Bond caps to test; the cutoffs come from ``base`` (defaults otherwise).
        seed: Sampling seed, reused for every chi.
        base: Truncation settings whose ``max_bond`` is overridden per chi.
    """
    if needs_reexecution(circuit):
        raise ValueError("validate_topk requires a circuit without mid-circuit measurement")
    if k < 1 or k > 2**circuit.n_qubits:
        raise ValueError(f"k must lie in [1, 2**{circuit.n_qubits}], got {k}")
    base = base or TruncationConfig()
    reference = top_k(sv_probabilities(circuit), k)
    report = ValidationReport(circuit.name, circuit.n_qubits, k, shots, seed, reference)
    for chi in chis:
        cfg = TruncationConfig(max_bond=chi, abs_cutoff=base.abs_cutoff, rel_cutoff=base.rel_cutoff)
        if shots is None:
            states = top_k(mps_probabilities(circuit, cfg), k)
        else:
            counts = mps_sample(circuit, shots, cfg, seed).counts_by_index()
            states = top_k(counts, k)
        report.per_chi[chi] = states
        report.matches[chi] = len(set(states) & set(reference))
    return report
