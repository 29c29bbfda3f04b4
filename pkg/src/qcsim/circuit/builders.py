"""Generators for the five benchmark circuits."""

from __future__ import annotations

import math

import numpy as np

from qcsim.circuit.ir import Circuit, CircuitError, Gate, Measure
from qcsim.tensor import random_unitary


def build_ghz(n: int) -> Circuit:
    """H on qubit 0 followed by a CX ladder; ``n`` gates."""
    if n < 2:
        raise CircuitError(f"GHZ needs at least 2 qubits, got {n}")
    ops = [Gate("H", (0,))] + [Gate("CX", (i, i + 1)) for i in range(n - 1)]
    return Circuit(n, tuple(ops), name="ghz", params={"n": n})


def build_qft(n: int, input_bits: str | None = None, include_swaps: bool = False) -> Circuit:
    """Quantum Fourier transform ladder.

    Args:
        n: Number of qubits.
        input_bits: Optional basis-state label to prepare with X gates. The
            label uses the outcome-key convention: the rightmost character is
            qubit 0.
        include_swaps: Append the SWAP layer that reverses qubit order.
    """
    if n < 1:
        raise CircuitError(f"QFT needs at least 1 qubit, got {n}")
    ops: list[Gate] = []
    if input_bits is not None:
        if len(input_bits) != n or set(input_bits) - {"0", "1"}:
            raise CircuitError(f"input_bits must be a {n}-character bitstring, got {input_bits!r}")
        ops += [Gate("X", (q,)) for q in range(n) if input_bits[n - 1 - q] == "1"]
    for i in range(n):
        ops.append(Gate("H", (i,)))
        for k in range(1, n - i):
            ops.append(Gate("CP", (i + k, i), theta=math.pi / 2**k))
    if include_swaps:
        ops += [Gate("SWAP", (i, n - 1 - i)) for i in range(n // 2)]
    params = {"n": n, "input_bits": input_bits, "include_swaps": include_swaps}
    return Circuit(n, tuple(ops), name="qft", params=params)


def build_quantum_volume(n: int, seed: int | None = 0) -> Circuit:
    """``n`` layers of Haar-random two-qubit unitaries on randomly paired qubits."""
    if n < 2 or n % 2:
        raise CircuitError(f"quantum volume needs an even qubit count >= 2, got {n}")
    rng = np.random.default_rng(seed)
    ops = []
    for _ in range(n):
        perm = rng.permutation(n)
        for k in range(n // 2):
            a, b = int(perm[2 * k]), int(perm[2 * k + 1])
            ops.append(Gate("U2", (a, b), unitary=random_unitary(4, rng)))
    return Circuit(n, tuple(ops), name="qv", params={"n": n, "seed": seed})


def build_qaoa(n: int, seed: int | None = 0) -> Circuit:
    """Single-layer QAOA on the complete graph with random weights and angles.

    Each edge contributes the block CX(i,j) RZ(2*gamma*w_ij)(j) CX(i,j).
    Angles and weights are uniform in [0, 2*pi).
    """
    if n < 2:
        raise CircuitError(f"QAOA needs at least 2 qubits, got {n}")
    rng = np.random.default_rng(seed)
    gamma, beta = (float(x) for x in rng.uniform(0, 2 * math.pi, size=2))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    weights = rng.uniform(0, 2 * math.pi, size=len(pairs))
    ops = [Gate("H", (q,)) for q in range(n)]
    for (i, j), w in zip(pairs, weights):
        ops += [
            Gate("CX", (i, j)),
            Gate("RZ", (j,), theta=2 * gamma * float(w)),
            Gate("CX", (i, j)),
        ]
    ops += [Gate("RX", (q,), theta=2 * beta) for q in range(n)]
    params = {"n": n, "seed": seed, "gamma": gamma, "beta": beta}
    return Circuit(n, tuple(ops), name="qaoa", params=params)


def build_counterfeit_coin(n: int, counterfeit_index: int = 0) -> Circuit:
    """Counterfeit-coin search with a mid-circuit parity measurement.

    Qubits ``0..n-2`` are coins and ``n-1`` is the ancilla. The query branch
    only runs when the parity measurement returned 0.
    """
    if n < 3:
        raise CircuitError(f"counterfeit coin needs at least 3 qubits, got {n}")
    if not 0 <= counterfeit_index < n - 1:
        raise CircuitError(f"counterfeit_index must lie in [0, {n - 1}), got {counterfeit_index}")
    coins = range(n - 1)
    anc = n - 1
    ops: list = [Gate("H", (c,)) for c in coins]
    ops += [Gate("CX", (c, anc)) for c in coins]
    ops.append(Measure(anc, 0))
    ops += [Gate("H", (c,), condition=(0, 0)) for c in coins]
    ops.append(Gate("X", (anc,), condition=(0, 0)))
    ops.append(Gate("CX", (counterfeit_index, anc), condition=(0, 0)))
    ops += [Gate("H", (c,), condition=(0, 0)) for c in coins]
    params = {"n": n, "counterfeit_index": counterfeit_index}
    return Circuit(n, tuple(ops), n_clbits=1, name="counterfeit_coin", params=params)


BUILDERS = {
    "ghz": build_ghz,
    "qft": build_qft,
    "qv": build_quantum_volume,
    "qaoa": build_qaoa,
    "counterfeit_coin": build_counterfeit_coin,
}
SEEDED = {"qv", "qaoa"}


def build(name: str, n: int, seed: int | None = 0) -> Circuit:
    """Build a benchmark circuit by name with default options."""
    key = name.lower().replace("-", "_")
    key = {"cc": "counterfeit_coin", "quantum_volume": "qv"}.get(key, key)
    if key not in BUILDERS:
        raise CircuitError(f"unknown circuit {name!r}; choose from {sorted(BUILDERS)}")
    if key in SEEDED:
        return BUILDERS[key](n, seed=seed)
    return BUILDERS[key](n)
