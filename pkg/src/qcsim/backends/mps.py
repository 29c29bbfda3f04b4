"""Matrix-product-state simulation with SVD truncation.

Site ``i`` holds qubit ``i`` as a ``(chi_left, 2, chi_right)`` tensor. The
chain is kept in mixed-canonical form around ``state.center``: sites to the
left are left-isometric, sites to the right are right-isometric. Two-site
splits absorb the singular values into the right factor, so applying a gate
on ``(i, i+1)`` leaves the center at ``i+1``. Keeping the center on the bond
being split makes the discarded weight equal to the lost squared norm.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from qcsim.backends.common import SampleResult, SimulationError
from qcsim.backends.statevector import StateVector, needs_reexecution
from qcsim.bench.memory import InfeasibleSimulation, default_guard, estimate_memory
from qcsim.circuit.ir import Circuit, Gate, Measure, MeasureAll, _FIXED
from qcsim.tensor import TruncationConfig, svd_truncate

SERIAL_FORMAT = "qcsim.mps"
SERIAL_VERSION = 1
_SAMPLE_BATCH = 16384
# widest register whose indices fit in int64; wider ones use Python ints
_INT64_QUBITS = 62

_SWAP = _FIXED["SWAP"]


@dataclass
class MPSStats:
    svd_calls: int = 0
    cumulative_discarded_weight: float = 0.0
    max_bond_reached: int = 1
    swap_gates_inserted: int = 0
    capped_splits: int = 0
    phase_timers: dict[str, float] = field(
        default_factory=lambda: {"gate_apply": 0.0, "svd": 0.0, "sampling": 0.0}
    )

    def merge(self, other: MPSStats) -> None:
        self.svd_calls += other.svd_calls
        self.cumulative_discarded_weight += other.cumulative_discarded_weight
        self.max_bond_reached = max(self.max_bond_reached, other.max_bond_reached)
        self.swap_gates_inserted += other.swap_gates_inserted
        self.capped_splits += other.capped_splits
        for k, v in other.phase_timers.items():
            self.phase_timers[k] = self.phase_timers.get(k, 0.0) + v

    def as_dict(self) -> dict:
        return asdict(self)


class MPSState:
    """Open-boundary MPS of ``n_qubits`` qubits."""

    def __init__(self, sites: list[np.ndarray], cfg: TruncationConfig, n_clbits: int = 0, center: int = 0) -> None:
        self.sites = sites
        self.cfg = cfg
        self.center = center
        self.classical_bits: list[int | None] = [None] * n_clbits
        self.stats = MPSStats()

    @property
    def n_qubits(self) -> int:
        return len(self.sites)

    @property
    def bonds(self) -> list[int]:
        """Extents of all ``n + 1`` bonds, boundaries included."""
        return [self.sites[0].shape[0]] + [s.shape[2] for s in self.sites]

    def copy(self) -> MPSState:
        out = MPSState([s.copy() for s in self.sites], self.cfg, 0, self.center)
        out.classical_bits = list(self.classical_bits)
        out.stats.merge(self.stats)
        return out

    def norm(self) -> float:
        """Squared norm from a full transfer-matrix contraction."""
        env = np.ones((1, 1), dtype=np.complex128)
        for a in self.sites:
            env = np.einsum("ab,aic,bid->cd", env, a, a.conj(), optimize=True)
        return float(env[0, 0].real)

    def check(self) -> None:
        """Assert the structural invariants of the chain."""
        bonds = self.bonds
        if bonds[0] != 1 or bonds[-1] != 1:
            raise AssertionError(f"boundary bonds must be 1, got {bonds[0]} and {bonds[-1]}")
        for i in range(self.n_qubits - 1):
            if self.sites[i].shape[2] != self.sites[i + 1].shape[0]:
                raise AssertionError(f"bond mismatch between sites {i} and {i + 1}")
        if max(bonds) > self.cfg.max_bond:
            raise AssertionError(f"bond {max(bonds)} exceeds max_bond {self.cfg.max_bond}")

    def to_dict(self) -> dict:
        return {
            "format": SERIAL_FORMAT,
            "version": SERIAL_VERSION,
            "n_qubits": self.n_qubits,
            "center": self.center,
            "truncation": asdict(self.cfg),
            "classical_bits": self.classical_bits,
            "sites": [
                {"shape": list(a.shape), "real": a.real.ravel().tolist(), "imag": a.imag.ravel().tolist()}
                for a in self.sites
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> MPSState:
        if data.get("format") != SERIAL_FORMAT:
            raise ValueError(f"not a {SERIAL_FORMAT} document")
        if data.get("version") != SERIAL_VERSION:
            raise ValueError(f"unsupported {SERIAL_FORMAT} version {data.get('version')}")
        sites = [
            (np.asarray(s["real"]) + 1j * np.asarray(s["imag"])).reshape(s["shape"])
            for s in data["sites"]
        ]
        state = cls(sites, TruncationConfig(**data["truncation"]), 0, data["center"])
        state.classical_bits = list(data["classical_bits"])
        return state

    def dumps(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def loads(cls, text: str) -> MPSState:
        return cls.from_dict(json.loads(text))


def mps_init(n: int, cfg: TruncationConfig | None = None, n_clbits: int = 0) -> MPSState:
    """Product state ``|0...0>`` with every bond of extent 1."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    zero = np.zeros((1, 2, 1), dtype=np.complex128)
    zero[0, 0, 0] = 1
    return MPSState([zero.copy() for _ in range(n)], cfg or TruncationConfig(), n_clbits)


def move_center(state: MPSState, target: int) -> None:
    """Shift the orthogonality center with QR sweeps."""
    sites = state.sites
    while state.center < target:
        c = state.center
        chi_l, d, chi_r = sites[c].shape
        q, r = np.linalg.qr(sites[c].reshape(chi_l * d, chi_r))
        sites[c] = q.reshape(chi_l, d, -1)
        nxt = sites[c + 1]
        sites[c + 1] = (r @ nxt.reshape(nxt.shape[0], -1)).reshape(r.shape[0], *nxt.shape[1:])
        state.center = c + 1
    while state.center > target:
        c = state.center
        chi_l, d, chi_r = sites[c].shape
        q, r = np.linalg.qr(sites[c].reshape(chi_l, d * chi_r).conj().T)
        sites[c] = q.conj().T.reshape(-1, d, chi_r)
        prv = sites[c - 1]
        sites[c - 1] = (prv.reshape(-1, prv.shape[2]) @ r.conj().T).reshape(*prv.shape[:2], -1)
        state.center = c - 1


def mps_apply_1q(state: MPSState, matrix: np.ndarray, qubit: int) -> MPSState:
    """Contract a 2x2 matrix into the physical index of ``qubit``; bonds are unchanged."""
    t0 = time.perf_counter()
    state.sites[qubit] = np.einsum("ij,ajb->aib", matrix, state.sites[qubit])
    state.stats.phase_timers["gate_apply"] += time.perf_counter() - t0
    return state


def _apply_adjacent(state: MPSState, matrix: np.ndarray, left: int) -> None:
    """Apply a 4x4 matrix in the ``|left, left+1>`` basis and split with truncation."""
    t0 = time.perf_counter()
    move_center(state, left)
    a, b = state.sites[left], state.sites[left + 1]
    chi_l, chi_r = a.shape[0], b.shape[2]
    theta = a.reshape(chi_l * 2, -1) @ b.reshape(b.shape[0], -1)
    theta = theta.reshape(chi_l, 4, chi_r).transpose(1, 0, 2).reshape(4, -1)
    theta = (matrix @ theta).reshape(2, 2, chi_l, chi_r).transpose(2, 0, 1, 3).reshape(chi_l * 2, 2 * chi_r)
    t1 = time.perf_counter()
    res = svd_truncate(theta, state.cfg)
    t2 = time.perf_counter()
    kept_norm = np.linalg.norm(res.s)
    s = res.s / kept_norm
    state.sites[left] = res.u.reshape(chi_l, 2, res.kept_rank)
    state.sites[left + 1] = (s[:, None] * res.v).reshape(res.kept_rank, 2, chi_r)
    state.center = left + 1
    st = state.stats
    st.svd_calls += 1
    st.cumulative_discarded_weight += res.discarded_weight
    st.max_bond_reached = max(st.max_bond_reached, res.kept_rank)
    if res.kept_rank == state.cfg.max_bond and min(theta.shape) > state.cfg.max_bond:
        st.capped_splits += 1
    st.phase_timers["svd"] += t2 - t1
    st.phase_timers["gate_apply"] += time.perf_counter() - t0 - (t2 - t1)


def mps_apply_2q(state: MPSState, matrix: np.ndarray, qubits: tuple[int, int]) -> MPSState:
    """Apply a 4x4 gate in the ``|qubits[0], qubits[1]>`` basis.

    Non-adjacent pairs are routed with SWAPs: the lower qubit walks up to sit
    next to the higher one and walks back afterwards. Every SWAP is an ordinary
    truncated two-site update.
    """
    q0, q1 = qubits
    if q0 == q1:
        raise SimulationError(f"two-qubit gate needs distinct qubits, got {qubits}")
    if q0 > q1:
        matrix = _SWAP @ matrix @ _SWAP
        q0, q1 = q1, q0
    path = range(q0, q1 - 1)
    for i in path:
        _apply_adjacent(state, _SWAP, i)
    _apply_adjacent(state, matrix, q1 - 1)
    for i in reversed(path):
        _apply_adjacent(state, _SWAP, i)
    state.stats.swap_gates_inserted += 2 * len(path)
    return state


def mps_apply(state: MPSState, gate: Gate) -> MPSState:
    """Apply a circuit gate, honouring its classical condition."""
    if gate.condition is not None:
        bit, value = gate.condition
        current = state.classical_bits[bit] if bit < len(state.classical_bits) else None
        if current is None:
            raise SimulationError(f"{gate.kind} conditioned on unwritten classical bit {bit}")
        if current != value:
            return state
    if gate.num_qubits == 1:
        return mps_apply_1q(state, gate.matrix(), gate.targets[0])
    return mps_apply_2q(state, gate.matrix(), gate.targets)


def mps_measure(state: MPSState, qubit: int, clbit: int | None, rng: np.random.Generator) -> MPSState:
    """Projective Z measurement of ``qubit``.

    With the center moved onto ``qubit`` both environments are identities, so
    the outcome probabilities are the squared norms of the two physical slices.
    """
    move_center(state, qubit)
    site = state.sites[qubit]
    p0 = float(np.vdot(site[:, 0, :], site[:, 0, :]).real)
    p1 = float(np.vdot(site[:, 1, :], site[:, 1, :]).real)
    outcome = int(rng.random() * (p0 + p1) >= p0)
    site = site.copy()
    site[:, 1 - outcome, :] = 0
    site /= np.sqrt(p1 if outcome else p0)
    state.sites[qubit] = site
    if clbit is not None:
        if clbit >= len(state.classical_bits):
            state.classical_bits.extend([None] * (clbit + 1 - len(state.classical_bits)))
        state.classical_bits[clbit] = outcome
    return state


def right_environments(state: MPSState) -> list[np.ndarray]:
    """``envs[i]`` contracts sites ``i..n-1`` with their conjugates into a ``chi x chi`` matrix."""
    n = state.n_qubits
    envs: list[np.ndarray] = [None] * (n + 1)  # type: ignore[list-item]
    envs[n] = np.ones((1, 1), dtype=np.complex128)
    for i in range(n - 1, -1, -1):
        a = state.sites[i]
        chi_l = a.shape[0]
        t = (a.reshape(chi_l * 2, -1) @ envs[i + 1]).reshape(chi_l, -1)
        envs[i] = t @ a.reshape(chi_l, -1).conj().T
    return envs


def _index_dtype(n: int) -> type:
    return np.int64 if n <= _INT64_QUBITS else object


def sample_indices(state: MPSState, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Draw basis-state indices by sequential conditional sampling.

    Qubits are sampled left to right; each conditional probability contracts
    the running left vector with the cached right environment, so a shot costs
    ``O(n * chi**2)``. Shots are processed in vectorised batches.
    """
    t0 = time.perf_counter()
    n = state.n_qubits
    envs = right_environments(state)
    out = np.empty(shots, dtype=_index_dtype(n))
    weights = np.array([1 << q for q in range(n)], dtype=_index_dtype(n))
    for start in range(0, shots, _SAMPLE_BATCH):
        m = min(_SAMPLE_BATCH, shots - start)
        u = rng.random((m, n))
        left = np.ones((m, 1), dtype=np.complex128)
        bits = np.empty((m, n), dtype=np.int64)
        for i, a in enumerate(state.sites):
            env = envs[i + 1]
            v0 = left @ a[:, 0, :]
            v1 = left @ a[:, 1, :]
            p0 = np.maximum(((v0 @ env) * v0.conj()).sum(axis=1).real, 0.0)
            p1 = np.maximum(((v1 @ env) * v1.conj()).sum(axis=1).real, 0.0)
            pick = u[:, i] * (p0 + p1) >= p0
            bits[:, i] = pick
            chosen = np.where(pick[:, None], v1, v0)
            norm = np.sqrt(np.where(pick, p1, p0))
            left = chosen / np.where(norm > 0, norm, 1.0)[:, None]
        out[start:start + m] = bits.astype(weights.dtype) @ weights
    state.stats.phase_timers["sampling"] += time.perf_counter() - t0
    return out


def mps_run(
    circuit: Circuit,
    cfg: TruncationConfig | None = None,
    rng: np.random.Generator | None = None,
) -> MPSState:
    """Execute ``circuit`` from ``|0...0>``; measurements draw from ``rng``."""
    state = mps_init(circuit.n_qubits, cfg, circuit.n_clbits)
    last_unitary = max((i for i, op in enumerate(circuit.ops) if not isinstance(op, MeasureAll)), default=-1)
    for pos, op in enumerate(circuit.ops):
        if isinstance(op, Gate):
            mps_apply(state, op)
        elif isinstance(op, Measure):
            if rng is None:
                raise SimulationError("circuit measures mid-circuit; an rng is required")
            mps_measure(state, op.qubit, op.clbit, rng)
        elif pos < last_unitary:
            if rng is None:
                raise SimulationError("circuit measures mid-circuit; an rng is required")
            for q in range(state.n_qubits):
                mps_measure(state, q, None, rng)
    return state


def mps_sample(
    circuit: Circuit,
    shots: int = 1024,
    cfg: TruncationConfig | None = None,
    seed: int | None = None,
) -> SampleResult:
    """Sample ``shots`` full-register outcomes from an MPS simulation.

    Without mid-circuit measurement the MPS is built once and sampled;
    otherwise the circuit is re-executed for every shot. ``stats`` of the
    result aggregates :class:`MPSStats` over all executions.
    """
    if shots < 1:
        raise ValueError(f"shots must be positive, got {shots}")
    cfg = cfg or TruncationConfig()
    rng = np.random.default_rng(seed)
    total = MPSStats()
    if not needs_reexecution(circuit):
        state = mps_run(circuit, cfg)
        indices = sample_indices(state, shots, rng)
        total.merge(state.stats)
        executions = 1
    else:
        indices = np.empty(shots, dtype=_index_dtype(circuit.n_qubits))
        for s in range(shots):
            state = mps_run(circuit, cfg, rng)
            indices[s] = sample_indices(state, 1, rng)[0]
            total.merge(state.stats)
        executions = shots
    stats = total.as_dict()
    stats["executions"] = executions
    return SampleResult.from_indices(indices, circuit.n_qubits, seed, stats)


def mps_probabilities(circuit: Circuit, cfg: TruncationConfig | None = None, guard: int | None = None) -> np.ndarray:
    """Outcome distribution of the (possibly truncated) final MPS."""
    if needs_reexecution(circuit):
        raise SimulationError("mps_probabilities requires a circuit without mid-circuit measurement")
    return np.abs(mps_to_statevector(mps_run(circuit, cfg), guard).amplitudes) ** 2


def mps_to_statevector(state: MPSState, guard: int | None = None) -> StateVector:
    """Contract the whole chain into ``2**n`` amplitudes (qubit 0 least significant)."""
    n = state.n_qubits
    guard = default_guard() if guard is None else guard
    est = estimate_memory("sv", n, "double")
    if est.bytes > guard:
        raise InfeasibleSimulation(est.bytes, guard, f"{n}-qubit state vector")
    # rows index qubits n-1..i in big-endian order, so qubit 0 ends up least significant
    psi = state.sites[n - 1].reshape(-1, 2).T  # (2, chi)
    for i in range(n - 2, -1, -1):
        a = state.sites[i]
        psi = np.tensordot(psi, a, axes=(1, 2)).transpose(0, 2, 1).reshape(-1, a.shape[0])
    amps = np.ascontiguousarray(psi.reshape(-1))
    sv = StateVector(n, amps)
    sv.classical_bits = list(state.classical_bits)
    return sv


@dataclass(frozen=True)
class ParamCount:
    """Stored complex parameters and the ``d * n * chi_max**2`` bound."""

    exact: int
    bound: int


def mps_param_count(state: MPSState, d: int = 2) -> ParamCount:
    exact = sum(int(a.size) for a in state.sites)
    return ParamCount(exact=exact, bound=d * state.n_qubits * state.cfg.max_bond**2)
