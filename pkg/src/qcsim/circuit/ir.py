"""Circuit intermediate representation.

A :class:`Circuit` is an immutable, ordered list of :class:`Gate`,
:class:`Measure` and :class:`MeasureAll` operations over ``n_qubits`` qubits and
``n_clbits`` classical bits. Two-qubit gate matrices are written in the basis
``|t0 t1>``, i.e. row index ``2 * bit(targets[0]) + bit(targets[1])``; for CX
and CP the first target is the control.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Mapping, Union

import numpy as np

from qcsim.tensor import ComplexTensor

UNITARY_ATOL = 1e-10


class CircuitError(ValueError):
    """Raised for invalid gates or circuits."""


_SQ2 = 1 / math.sqrt(2)
_FIXED = {
    "H": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
    "CX": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128),
    "CZ": np.diag([1, 1, 1, -1]).astype(np.complex128),
    "SWAP": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.complex128),
}
for _m in _FIXED.values():
    _m.flags.writeable = False

ARITY = {
    "H": 1, "X": 1, "Y": 1, "Z": 1, "RX": 1, "RY": 1, "RZ": 1, "U1": 1,
    "CX": 2, "CZ": 2, "CP": 2, "SWAP": 2, "U2": 2,
}
PARAMETRIC = {"RX", "RY", "RZ", "CP"}


def _rotation(kind: str, theta: float) -> ComplexTensor:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    if kind == "RX":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
    if kind == "RY":
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    if kind == "RZ":
        return np.diag([complex(c, -s), complex(c, s)])
    # CP
    return np.diag([1, 1, 1, np.exp(1j * theta)]).astype(np.complex128)


@dataclass(frozen=True, eq=False)
class Gate:
    """A unitary gate, optionally conditioned on one classical bit.

    Attributes:
        kind: Gate name, one of :data:`ARITY`'s keys.
        targets: Qubit indices; for CX/CP the control comes first.
        theta: Rotation angle for RX, RY, RZ and CP.
        unitary: Explicit matrix for U1 (2x2) and U2 (4x4).
        condition: ``(classical_bit, value)``; the gate only acts when the bit equals ``value``.
    """

    kind: str
    targets: tuple[int, ...]
    theta: float | None = None
    unitary: ComplexTensor | None = None
    condition: tuple[int, int] | None = None

    def __post_init__(self) -> None:
        kind = self.kind.upper()
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if kind not in ARITY:
            raise CircuitError(f"unknown gate kind {self.kind!r}; expected one of {sorted(ARITY)}")
        if len(self.targets) != ARITY[kind]:
            raise CircuitError(f"{kind} acts on {ARITY[kind]} qubit(s), got targets {self.targets}")
        if len(set(self.targets)) != len(self.targets):
            raise CircuitError(f"{kind} targets must be distinct, got {self.targets}")
        if any(t < 0 for t in self.targets):
            raise CircuitError(f"negative qubit index in {self.targets}")
        if kind in PARAMETRIC:
            if self.theta is None:
                raise CircuitError(f"{kind} requires an angle")
            object.__setattr__(self, "theta", float(self.theta))
        elif self.theta is not None:
            raise CircuitError(f"{kind} takes no angle")
        if kind in ("U1", "U2"):
            if self.unitary is None:
                raise CircuitError(f"{kind} requires a matrix")
            dim = 2 ** ARITY[kind]
            u = np.array(self.unitary, dtype=np.complex128)
            if u.shape != (dim, dim):
                raise CircuitError(f"{kind} matrix must be {dim}x{dim}, got {u.shape}")
            if not np.allclose(u.conj().T @ u, np.eye(dim), rtol=0, atol=UNITARY_ATOL):
                raise CircuitError(f"{kind} matrix is not unitary within {UNITARY_ATOL}")
            u.flags.writeable = False
            object.__setattr__(self, "unitary", u)
        elif self.unitary is not None:
            raise CircuitError(f"{kind} takes no explicit matrix")
        if self.condition is not None:
            bit, value = (int(x) for x in self.condition)
            if bit < 0 or value not in (0, 1):
                raise CircuitError(f"bad condition {self.condition}; need (bit >= 0, value in {{0, 1}})")
            object.__setattr__(self, "condition", (bit, value))

    @property
    def num_qubits(self) -> int:
        return len(self.targets)

    def matrix(self) -> ComplexTensor:
        if self.kind in _FIXED:
            return _FIXED[self.kind]
        if self.unitary is not None:
            return self.unitary
        return _rotation(self.kind, self.theta)

    def with_condition(self, bit: int, value: int) -> Gate:
        return Gate(self.kind, self.targets, self.theta, self.unitary, (bit, value))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Gate):
            return NotImplemented
        same_matrix = (self.unitary is None and other.unitary is None) or (
            self.unitary is not None
            and other.unitary is not None
            and np.array_equal(self.unitary, other.unitary)
        )
        return (
            self.kind == other.kind
            and self.targets == other.targets
            and self.theta == other.theta
            and self.condition == other.condition
            and same_matrix
        )

    def __hash__(self) -> int:
        return hash((self.kind, self.targets, self.theta, self.condition))


@dataclass(frozen=True)
class Measure:
    """Measure ``qubit`` in the computational basis and store the outcome in ``clbit``."""

    qubit: int
    clbit: int


@dataclass(frozen=True)
class MeasureAll:
    """Terminal measurement of every qubit."""


Op = Union[Gate, Measure, MeasureAll]


@dataclass(frozen=True)
class Circuit:
    """Ordered operations over ``n_qubits`` qubits.

    Construction checks gate arity and index bounds. The stricter
    condition-before-use rule lives in :meth:`check_conditions`, since partial
    programs (e.g. a lone conditional statement) are legal to build.
    """

    n_qubits: int
    ops: tuple[Op, ...] = ()
    n_clbits: int | None = None
    name: str = "circuit"
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if int(self.n_qubits) != self.n_qubits or self.n_qubits < 1:
            raise CircuitError(f"n_qubits must be a positive integer, got {self.n_qubits}")
        ops = tuple(self.ops)
        object.__setattr__(self, "ops", ops)
        used_bits = -1
        for op in ops:
            if isinstance(op, Gate):
                bad = [t for t in op.targets if t >= self.n_qubits]
                if bad:
                    raise CircuitError(f"{op.kind} targets {bad} outside {self.n_qubits}-qubit circuit")
                if op.condition is not None:
                    used_bits = max(used_bits, op.condition[0])
            elif isinstance(op, Measure):
                if not 0 <= op.qubit < self.n_qubits:
                    raise CircuitError(f"measure on qubit {op.qubit} outside {self.n_qubits}-qubit circuit")
                if op.clbit < 0:
                    raise CircuitError(f"negative classical bit {op.clbit}")
                used_bits = max(used_bits, op.clbit)
            elif not isinstance(op, MeasureAll):
                raise CircuitError(f"unsupported operation {op!r}")
        if self.n_clbits is None:
            object.__setattr__(self, "n_clbits", used_bits + 1)
        elif self.n_clbits <= used_bits:
            raise CircuitError(f"classical bit {used_bits} outside register of size {self.n_clbits}")

    def check_conditions(self) -> None:
        """Raise unless every conditioned gate reads a bit written by an earlier Measure."""
        written: set[int] = set()
        for pos, op in enumerate(self.ops):
            if isinstance(op, Measure):
                written.add(op.clbit)
            elif isinstance(op, Gate) and op.condition is not None and op.condition[0] not in written:
                raise CircuitError(f"op {pos}: condition reads classical bit {op.condition[0]} before any measure")

    @property
    def has_mid_circuit_measurement(self) -> bool:
        """True if any explicit Measure or classically conditioned gate occurs."""
        return any(
            isinstance(op, Measure) or (isinstance(op, Gate) and op.condition is not None)
            for op in self.ops
        )

    def gates(self) -> Iterable[Gate]:
        return (op for op in self.ops if isinstance(op, Gate))

    def inverse(self) -> Circuit:
        """Adjoint circuit. Only defined for measurement-free circuits."""
        if any(not isinstance(op, Gate) or op.condition is not None for op in self.ops):
            raise CircuitError("inverse requires a unitary circuit")
        inv = [
            Gate("U2" if g.num_qubits == 2 else "U1", g.targets, unitary=g.matrix().conj().T)
            for g in reversed(self.ops)
        ]
        return Circuit(self.n_qubits, tuple(inv), name=f"{self.name}_inv")


@dataclass(frozen=True)
class CircuitMetrics:
    total_gates: int
    two_qubit_gates: int
    entanglement_ratio: Fraction
    depth: int

    def as_dict(self) -> dict[str, Any]:
        return {
            "total_gates": self.total_gates,
            "two_qubit_gates": self.two_qubit_gates,
            "entanglement_ratio": float(self.entanglement_ratio),
            "entanglement_ratio_exact": str(self.entanglement_ratio),
            "depth": self.depth,
        }


def metrics(circuit: Circuit) -> CircuitMetrics:
    """Gate counts, entanglement ratio and depth.

    Explicit mid-circuit :class:`Measure` ops count toward the total;
    terminal :class:`MeasureAll` does not.
    """
    total = two = 0
    level = [0] * circuit.n_qubits
    for op in circuit.ops:
        if isinstance(op, Gate):
            total += 1
            two += op.num_qubits == 2
            qubits = op.targets
        elif isinstance(op, Measure):
            total += 1
            qubits = (op.qubit,)
        else:
            qubits = tuple(range(circuit.n_qubits))
        top = max(level[q] for q in qubits) + 1
        for q in qubits:
            level[q] = top
    ratio = Fraction(two, total) if total else Fraction(0)
    return CircuitMetrics(total, two, ratio, max(level))
