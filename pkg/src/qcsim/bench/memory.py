"""Memory footprint estimates for state-vector and MPS simulation."""

from __future__ import annotations

import os
import re
from dataclasses import dataclass

BYTES_PER_COMPLEX = {"single": 8, "double": 16}
PHYSICAL_DIM = 2

_UNITS = {
    "": 1, "b": 1,
    "kb": 10**3, "mb": 10**6, "gb": 10**9, "tb": 10**12, "pb": 10**15,
    "kib": 2**10, "mib": 2**20, "gib": 2**30, "tib": 2**40, "pib": 2**50,
}


class InfeasibleSimulation(MemoryError):
    """A simulation would exceed its memory budget."""

    def __init__(self, required: int, budget: int, what: str = "simulation") -> None:
        self.required = required
        self.budget = budget
        super().__init__(
            f"infeasible: {what} requires {format_bytes(required)} ({required} B) "
            f"> guard {format_bytes(budget)} ({budget} B)"
        )


@dataclass(frozen=True)
class MemoryEstimate:
    backend: str
    n_qubits: int
    precision: str
    complex_values: int
    bytes: int
    budget: int | None
    max_bond: int | None = None

    @property
    def feasible(self) -> bool | None:
        return None if self.budget is None else self.bytes <= self.budget

    def verdict(self) -> str:
        size = format_bytes(self.bytes)
        if self.budget is None:
            return size
        return f"{size}, {'feasible' if self.feasible else 'infeasible'}"

    def as_dict(self) -> dict:
        return {
            "backend": self.backend,
            "n_qubits": self.n_qubits,
            "precision": self.precision,
            "max_bond": self.max_bond,
            "complex_values": self.complex_values,
            "bytes": self.bytes,
            "human": format_bytes(self.bytes),
            "budget": self.budget,
            "feasible": self.feasible,
        }


def parse_bytes(text: str | int) -> int:
    """Parse sizes such as ``96GiB``, ``1.5 TB`` or ``4096``."""
    if isinstance(text, int):
        return text
    m = re.fullmatch(r"\s*([0-9]*\.?[0-9]+(?:[eE][+-]?\d+)?)\s*([A-Za-z]*)\s*", text)
    if not m or m.group(2).lower() not in _UNITS:
        raise ValueError(f"cannot parse byte size {text!r}")
    return int(float(m.group(1)) * _UNITS[m.group(2).lower()])


def format_bytes(n: int) -> str:
    """Binary-unit rendering, e.g. ``64 GiB`` or ``12.5 MiB``."""
    for unit, scale in (("PiB", 2**50), ("TiB", 2**40), ("GiB", 2**30), ("MiB", 2**20), ("KiB", 2**10)):
        if n >= scale:
            value = n / scale
            return f"{value:.0f} {unit}" if value == int(value) else f"{value:.3g} {unit}"
    return f"{n} B"


def mps_parameter_bound(n: int, max_bond: int, d: int = PHYSICAL_DIM) -> int:
    """``d * n * chi**2`` complex parameters."""
    return d * n * max_bond**2


def estimate_memory(
    backend: str,
    n: int,
    precision: str = "double",
    max_bond: int | None = None,
    budget: int | str | None = None,
) -> MemoryEstimate:
    """Bytes needed to hold the simulator state.

    Args:
        backend: ``"sv"`` or ``"mps"``.
        n: Number of qubits.
        precision: ``"single"`` (8 B per amplitude) or ``"double"`` (16 B).
        max_bond: Bond cap for the MPS bound; required for ``"mps"``.
        budget: Optional byte budget for the feasibility verdict.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if precision not in BYTES_PER_COMPLEX:
        raise ValueError(f"precision must be one of {sorted(BYTES_PER_COMPLEX)}, got {precision!r}")
    if backend == "sv":
        values = 2**n
    elif backend == "mps":
        if max_bond is None:
            raise ValueError("mps estimate needs max_bond")
        values = mps_parameter_bound(n, max_bond)
    else:
        raise ValueError(f"backend must be 'sv' or 'mps', got {backend!r}")
    return MemoryEstimate(
        backend=backend,
        n_qubits=n,
        precision=precision,
        complex_values=values,
        bytes=values * BYTES_PER_COMPLEX[precision],
        budget=None if budget is None else parse_bytes(budget),
        max_bond=max_bond if backend == "mps" else None,
    )


def available_memory() -> int:
    """Currently available physical memory in bytes."""
    try:
        with open("/proc/meminfo") as fh:
            for line in fh:
                if line.startswith("MemAvailable:"):
                    return int(line.split()[1]) * 1024
    except OSError:
        pass
    return os.sysconf("SC_AVPHYS_PAGES") * os.sysconf("SC_PAGE_SIZE")


def default_guard() -> int:
    """75% of available memory."""
    return int(0.75 * available_memory())
