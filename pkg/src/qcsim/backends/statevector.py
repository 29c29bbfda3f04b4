"""Exact state-vector simulation.

Qubit ``q`` is bit ``q`` of the amplitude index (little-endian), so viewing
the amplitudes as a ``(2,) * n`` tensor puts qubit ``q`` on axis ``n - 1 - q``.
"""

from __future__ import annotations

import time

import numpy as np

from qcsim.backends.common import SampleResult, SimulationError, draw_outcomes
from qcsim.bench.memory import InfeasibleSimulation, default_guard, estimate_memory
from qcsim.circuit.ir import Circuit, Gate, Measure, MeasureAll


class StateVector:
    """``2**n`` complex amplitudes plus a classical bit register.

    Unwritten classical bits are ``None``.
    """

    def __init__(self, n_qubits: int, amplitudes: np.ndarray, n_clbits: int = 0) -> None:
        self.n_qubits = n_qubits
        self.amplitudes = amplitudes
        self.classical_bits: list[int | None] = [None] * n_clbits

    def copy(self) -> StateVector:
        out = StateVector(self.n_qubits, self.amplitudes.copy())
        out.classical_bits = list(self.classical_bits)
        return out

    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def _ensure_clbit(self, bit: int) -> None:
        if bit >= len(self.classical_bits):
            self.classical_bits.extend([None] * (bit + 1 - len(self.classical_bits)))


def sv_init(n: int, guard: int | None = None, n_clbits: int = 0) -> StateVector:
    """``|0...0>`` on ``n`` qubits.

    Raises:
        InfeasibleSimulation: If ``2**n`` double-precision amplitudes exceed
            ``guard`` bytes (default: 75% of available memory).
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    guard = default_guard() if guard is None else guard
    est = estimate_memory("sv", n, "double")
    if est.bytes > guard:
        raise InfeasibleSimulation(est.bytes, guard, f"{n}-qubit state vector")
    amps = np.zeros(2**n, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(n, amps, n_clbits)


def apply_matrix(amps: np.ndarray, n: int, matrix: np.ndarray, targets: tuple[int, ...]) -> None:
    """Apply a 1- or 2-qubit matrix to ``amps`` in place."""
    if len(targets) == 1:
        q = targets[0]
        v = amps.reshape(-1, 2, 2**q)
        a0 = v[:, 0, :].copy()
        a1 = v[:, 1, :]
        (m00, m01), (m10, m11) = matrix
        v[:, 0, :] = m00 * a0 + m01 * a1
        v[:, 1, :] = m10 * a0 + m11 * a1
        return
    psi = amps.reshape((2,) * n)
    axes = [n - 1 - t for t in targets]
    out = np.tensordot(matrix.reshape(2, 2, 2, 2), psi, axes=([2, 3], axes))
    amps[:] = np.moveaxis(out, [0, 1], axes).reshape(-1)


def sv_apply(state: StateVector, gate: Gate) -> StateVector:
    """Apply ``gate`` in place, honouring its classical condition."""
    if any(t >= state.n_qubits for t in gate.targets):
        raise SimulationError(f"{gate.kind} targets {gate.targets} outside {state.n_qubits} qubits")
    if gate.condition is not None:
        bit, value = gate.condition
        current = state.classical_bits[bit] if bit < len(state.classical_bits) else None
        if current is None:
            raise SimulationError(f"{gate.kind} conditioned on unwritten classical bit {bit}")
        if current != value:
            return state
    apply_matrix(state.amplitudes, state.n_qubits, gate.matrix(), gate.targets)
    return state


def sv_measure(state: StateVector, qubit: int, clbit: int | None, rng: np.random.Generator) -> StateVector:
    """Projective Z measurement of ``qubit``; the outcome is stored in ``clbit``."""
    v = state.amplitudes.reshape(-1, 2, 2**qubit)
    p1 = float(np.vdot(v[:, 1, :], v[:, 1, :]).real)
    p0 = max(0.0, state.norm() - p1)
    outcome = int(rng.random() * (p0 + p1) >= p0)
    p = p1 if outcome else p0
    v[:, 1 - outcome, :] = 0
    v[:, outcome, :] /= np.sqrt(p)
    if clbit is not None:
        state._ensure_clbit(clbit)
        state.classical_bits[clbit] = outcome
    return state


def _collapse_all(state: StateVector, rng: np.random.Generator) -> None:
    idx = int(draw_outcomes(state.probabilities(), 1, rng)[0])
    state.amplitudes[:] = 0
    state.amplitudes[idx] = 1


def sv_run(circuit: Circuit, rng: np.random.Generator | None = None, guard: int | None = None) -> StateVector:
    """Execute ``circuit`` from ``|0...0>``; measurements draw from ``rng``."""
    state = sv_init(circuit.n_qubits, guard, circuit.n_clbits)
    last_unitary = max((i for i, op in enumerate(circuit.ops) if not isinstance(op, MeasureAll)), default=-1)
    for pos, op in enumerate(circuit.ops):
        if isinstance(op, Gate):
            sv_apply(state, op)
        elif isinstance(op, Measure):
            if rng is None:
                raise SimulationError("circuit measures mid-circuit; an rng is required")
            sv_measure(state, op.qubit, op.clbit, rng)
        elif pos < last_unitary:
            if rng is None:
                raise SimulationError("circuit measures mid-circuit; an rng is required")
            _collapse_all(state, rng)
    return state


def needs_reexecution(circuit: Circuit) -> bool:
    """True if the final state depends on measurement outcomes."""
    if circuit.has_mid_circuit_measurement:
        return True
    seen_all = False
    for op in circuit.ops:
        if isinstance(op, MeasureAll):
            seen_all = True
        elif seen_all:
            return True
    return False


def sv_probabilities(circuit: Circuit, guard: int | None = None) -> np.ndarray:
    """Exact outcome distribution over all ``2**n`` basis states.

    Raises:
        SimulationError: If the circuit contains mid-circuit measurement.
    """
    if needs_reexecution(circuit):
        raise SimulationError("sv_probabilities requires a circuit without mid-circuit measurement")
    return sv_run(circuit, guard=guard).probabilities()


def sv_sample(circuit: Circuit, shots: int = 1024, seed: int | None = None, guard: int | None = None) -> SampleResult:
    """Sample ``shots`` full-register outcomes.

    Circuits without mid-circuit measurement are simulated once and sampled
    from ``|amp|**2``; otherwise the whole circuit is re-executed per shot.
    """
    if shots < 1:
        raise ValueError(f"shots must be positive, got {shots}")
    rng = np.random.default_rng(seed)
    n = circuit.n_qubits
    guard = default_guard() if guard is None else guard
    t0 = time.perf_counter()
    if not needs_reexecution(circuit):
        state = sv_run(circuit, guard=guard)
        t1 = time.perf_counter()
        indices = draw_outcomes(state.probabilities(), shots, rng)
        timers = {"gate_apply": t1 - t0, "sampling": time.perf_counter() - t1}
        return SampleResult.from_indices(indices, n, seed, {"phase_timers": timers, "executions": 1})
    indices = np.empty(shots, dtype=np.int64)
    for s in range(shots):
        state = sv_run(circuit, rng, guard)
        indices[s] = draw_outcomes(state.probabilities(), 1, rng)[0]
    timers = {"gate_apply": time.perf_counter() - t0, "sampling": 0.0}
    return SampleResult.from_indices(indices, n, seed, {"phase_timers": timers, "executions": shots})
