"""Benchmark protocol: one untimed warm-up, then timed repetitions.

The circuit is rebuilt for every repetition so that construction cost is part
of each measurement.
"""

from __future__ import annotations

import csv
import io
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Sequence

from qcsim.backends.common import SampleResult
from qcsim.backends.mps import mps_sample
from qcsim.backends.statevector import sv_sample
from qcsim.bench.fitting import FitResult, best_fit
from qcsim.bench.memory import InfeasibleSimulation, default_guard, estimate_memory
from qcsim.circuit.builders import build
from qcsim.circuit.ir import Circuit
from qcsim.tensor import TruncationConfig

DEFAULT_SHOTS = 1024
DEFAULT_REPETITIONS = 10
DEFAULT_WARMUP = 1

CSV_FIELDS = (
    "circuit", "n", "backend", "shots", "seed", "median_s", "mean_s", "stddev_s",
    "max_bond", "discarded_weight", "status",
)


@dataclass(frozen=True)
class CircuitSpec:
    """Recipe for rebuilding a benchmark circuit."""

    name: str
    n_qubits: int
    seed: int | None = 0

    def build(self) -> Circuit:
        return build(self.name, self.n_qubits, seed=self.seed)


@dataclass
class BenchRecord:
    circuit: str
    n_qubits: int
    backend: str
    shots: int
    seed: int | None
    repetitions: int
    status: str = "ok"
    times: list[float] = field(default_factory=list)
    phase_timers: dict[str, float] = field(default_factory=dict)
    max_bond_reached: int | None = None
    cumulative_discarded_weight: float | None = None
    histogram: dict[str, int] | None = None
    truncation: dict[str, float] | None = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    @property
    def median(self) -> float | None:
        return statistics.median(self.times) if self.times else None

    @property
    def mean(self) -> float | None:
        return statistics.fmean(self.times) if self.times else None

    @property
    def stddev(self) -> float | None:
        return statistics.stdev(self.times) if len(self.times) > 1 else (0.0 if self.times else None)

    def as_dict(self) -> dict[str, Any]:
        """JSON form; everything timing-dependent lives under ``"timing"``."""
        return {
            "circuit": self.circuit,
            "n_qubits": self.n_qubits,
            "backend": self.backend,
            "shots": self.shots,
            "seed": self.seed,
            "repetitions": self.repetitions,
            "status": self.status,
            "truncation": self.truncation,
            "max_bond_reached": self.max_bond_reached,
            "cumulative_discarded_weight": self.cumulative_discarded_weight,
            "histogram": self.histogram,
            "timing": {
                "times_s": list(self.times),
                "median_s": self.median,
                "mean_s": self.mean,
                "stddev_s": self.stddev,
                "phase_timers": dict(self.phase_timers),
            },
        }

    def csv_row(self) -> dict[str, Any]:
        return {
            "circuit": self.circuit,
            "n": self.n_qubits,
            "backend": self.backend,
            "shots": self.shots,
            "seed": self.seed,
            "median_s": self.median,
            "mean_s": self.mean,
            "stddev_s": self.stddev,
            "max_bond": self.max_bond_reached,
            "discarded_weight": self.cumulative_discarded_weight,
            "status": self.status,
        }


def simulate(circuit: Circuit, backend: str, shots: int, cfg: TruncationConfig, seed: int | None, guard: int | None = None) -> SampleResult:
    """Run one sampling job on the named backend."""
    if backend == "sv":
        return sv_sample(circuit, shots, seed, guard)
    if backend == "mps":
        return mps_sample(circuit, shots, cfg, seed)
    raise ValueError(f"unknown backend {backend!r}; choose from ['mps', 'sv']")


def feasibility(backend: str, n: int, cfg: TruncationConfig, guard: int) -> InfeasibleSimulation | None:
    est = estimate_memory(backend, n, "double", max_bond=cfg.max_bond if backend == "mps" else None)
    if est.bytes > guard:
        return InfeasibleSimulation(est.bytes, guard, f"{backend} at n={n}")
    return None


def run_bench(
    spec: CircuitSpec,
    backend: str,
    shots: int = DEFAULT_SHOTS,
    cfg: TruncationConfig | None = None,
    seed: int | None = None,
    repetitions: int = DEFAULT_REPETITIONS,
    warmup: int = DEFAULT_WARMUP,
    guard: int | None = None,
) -> BenchRecord:
    """Time ``repetitions`` full simulations after ``warmup`` untimed ones.

    A run the memory guard refuses comes back with an ``infeasible: ...``
    status instead of raising.
    """
    cfg = cfg or TruncationConfig()
    guard = default_guard() if guard is None else guard
    record = BenchRecord(
        circuit=spec.name,
        n_qubits=spec.n_qubits,
        backend=backend,
        shots=shots,
        seed=seed,
        repetitions=repetitions,
        truncation={"max_bond": cfg.max_bond, "abs_cutoff": cfg.abs_cutoff, "rel_cutoff": cfg.rel_cutoff}
        if backend == "mps" else None,
    )
    refusal = feasibility(backend, spec.n_qubits, cfg, guard)
    if refusal is not None:
        record.status = str(refusal)
        return record
    try:
        for _ in range(warmup):
            simulate(spec.build(), backend, shots, cfg, seed, guard)
        result = None
        for _ in range(repetitions):
            t0 = time.perf_counter()
            result = simulate(spec.build(), backend, shots, cfg, seed, guard)
            record.times.append(time.perf_counter() - t0)
    except InfeasibleSimulation as exc:
        record.status = str(exc)
        record.times.clear()
        return record
    if result is not None:
        record.histogram = result.histogram
        record.phase_timers = dict(result.stats.get("phase_timers", {}))
        if backend == "mps":
            record.max_bond_reached = result.stats["max_bond_reached"]
            record.cumulative_discarded_weight = result.stats["cumulative_discarded_weight"]
    return record


@dataclass
class SweepResult:
    records: list[BenchRecord]
    best: FitResult | None = None
    fits: dict[str, FitResult] = field(default_factory=dict)

    def points(self) -> list[tuple[int, float]]:
        return [(r.n_qubits, r.median) for r in self.records if r.ok and r.median is not None]

    def as_dict(self) -> dict[str, Any]:
        return {
            "records": [r.as_dict() for r in self.records],
            "fits": {k: v.as_dict() for k, v in self.fits.items()},
            "best_model": self.best.model if self.best else None,
        }


def sweep(
    circuit: str,
    backend: str,
    ns: Sequence[int],
    cfg: TruncationConfig | None = None,
    seed: int | None = 0,
    shots: int = DEFAULT_SHOTS,
    repetitions: int = DEFAULT_REPETITIONS,
    warmup: int = DEFAULT_WARMUP,
    fit: bool = True,
    guard: int | None = None,
    workers: int = 1,
) -> SweepResult:
    """Benchmark ``circuit`` over qubit counts ``ns``.

    Points run sequentially unless ``workers > 1``. With ``fit`` and at least
    three completed points, both runtime models are fitted and the better one
    (by R²) is reported.
    """
    guard = default_guard() if guard is None else guard

    def one(n: int) -> BenchRecord:
        return run_bench(CircuitSpec(circuit, n, seed), backend, shots, cfg, seed, repetitions, warmup, guard)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(one, ns))
    else:
        records = [one(n) for n in ns]
    result = SweepResult(records)
    if fit and len(result.points()) >= 3:
        result.best, result.fits = best_fit(result.points())
    return result


def records_to_csv(records: Sequence[BenchRecord]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for r in records:
        writer.writerow(r.csv_row())
    return buf.getvalue()
