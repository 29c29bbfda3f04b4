from fractions import Fraction

import numpy as np
import pytest

from oracles import bit_reverse, dense_unitary, dft_matrix
from qcsim.circuit import (
    Circuit,
    CircuitError,
    Gate,
    Measure,
    MeasureAll,
    build,
    build_counterfeit_coin,
    build_ghz,
    build_qaoa,
    build_qft,
    build_quantum_volume,
    metrics,
)


@pytest.mark.parametrize("n", range(4, 21))
def test_ghz_counts(n):
    m = metrics(build_ghz(n))
    assert (m.total_gates, m.two_qubit_gates) == (n, n - 1)
    assert m.entanglement_ratio == Fraction(n - 1, n)


@pytest.mark.parametrize("n", range(4, 21, 2))
def test_quantum_volume_counts(n):
    m = metrics(build_quantum_volume(n, seed=n))
    assert m.total_gates == n * n // 2
    assert m.two_qubit_gates == m.total_gates
    assert m.entanglement_ratio == 1


@pytest.mark.parametrize("n", range(4, 21))
def test_qft_counts(n):
    m = metrics(build_qft(n))
    assert m.total_gates == n * (n + 1) // 2
    assert m.two_qubit_gates == n * (n - 1) // 2


@pytest.mark.parametrize("n", range(4, 21))
def test_qaoa_counts(n):
    m = metrics(build_qaoa(n, seed=1))
    assert m.total_gates == n * (3 * n + 1) // 2
    assert m.two_qubit_gates == n * (n - 1)
    assert m.entanglement_ratio == Fraction(2 * (n - 1), 3 * n + 1)


@pytest.mark.parametrize("n", range(3, 21))
def test_counterfeit_coin_counts(n):
    m = metrics(build_counterfeit_coin(n))
    assert m.total_gates == 4 * n - 1
    assert m.two_qubit_gates == n
    assert m.entanglement_ratio == Fraction(n, 4 * n - 1)


def test_small_examples():
    assert metrics(build_ghz(4)).entanglement_ratio == Fraction(3, 4)
    assert float(metrics(build_ghz(10)).entanglement_ratio) == pytest.approx(0.9)
    assert metrics(build_quantum_volume(4)).total_gates == 8
    assert metrics(build_quantum_volume(2)).total_gates == 2
    assert metrics(build_qft(3)).total_gates == 6
    assert [g.kind for g in build_qft(1).ops] == ["H"]
    assert [g.kind for g in build_qaoa(2).ops] == ["H", "H", "CX", "RZ", "CX", "RX", "RX"]
    assert metrics(build_counterfeit_coin(12)).entanglement_ratio == Fraction(12, 47)
    assert len(build_counterfeit_coin(3).ops) == 11
    assert metrics(build_counterfeit_coin(8)).two_qubit_gates == 8


def test_qaoa_ten_qubits():
    m = metrics(build_qaoa(10))
    assert (m.total_gates, m.two_qubit_gates) == (155, 90)


def test_ghz_two_is_bell_circuit():
    c = build_ghz(2)
    assert c.ops == (Gate("H", (0,)), Gate("CX", (0, 1)))


def test_asymptotic_ratios():
    assert abs(float(metrics(build_counterfeit_coin(400)).entanglement_ratio) - 0.25) <= 0.001
    assert metrics(build_quantum_volume(8)).entanglement_ratio == 1


@pytest.mark.parametrize("n", [4, 8, 20])
def test_ratio_bounds_and_depth(n):
    for name in ("ghz", "qft", "qv", "qaoa", "cc"):
        m = metrics(build(name, n))
        assert 0 <= m.entanglement_ratio <= 1
        assert 1 <= m.depth <= m.total_gates


def test_ghz_depth():
    assert metrics(build_ghz(6)).depth == 6


@pytest.mark.parametrize("builder", [build_quantum_volume, build_qaoa])
def test_seeded_builders_deterministic(builder):
    a, b = builder(6, seed=3), builder(6, seed=3)
    assert a.ops == b.ops
    assert builder(6, seed=4).ops != a.ops


def test_qaoa_parameters_in_range():
    c = build_qaoa(5, seed=9)
    assert 0 <= c.params["gamma"] < 2 * np.pi
    assert 0 <= c.params["beta"] < 2 * np.pi
    assert c.params == build_qaoa(5, seed=9).params


@pytest.mark.parametrize("name", ["ghz", "qft", "qv", "qaoa", "cc"])
@pytest.mark.parametrize("n", [4, 6, 12])
def test_builder_circuits_are_valid(name, n):
    c = build(name, n)
    c.check_conditions()
    for g in c.gates():
        u = g.matrix()
        np.testing.assert_allclose(u.conj().T @ u, np.eye(len(u)), atol=1e-10)
        assert all(0 <= t < n for t in g.targets)


@pytest.mark.parametrize(
    "call",
    [
        lambda: build_ghz(1),
        lambda: build_qft(0),
        lambda: build_qft(3, input_bits="01"),
        lambda: build_qft(2, input_bits="0a"),
        lambda: build_quantum_volume(5),
        lambda: build_qaoa(1),
        lambda: build_counterfeit_coin(2),
        lambda: build_counterfeit_coin(5, counterfeit_index=4),
        lambda: build("nope", 4),
    ],
)
def test_builder_errors(call):
    with pytest.raises(CircuitError):
        call()


@pytest.mark.parametrize("bits", ["0000", "0101", "1110"])
def test_qft_prepared_state_matches_dft(bits):
    n = len(bits)
    k = int(bits, 2)
    psi = dense_unitary(build_qft(n, input_bits=bits))[:, 0]
    f = dft_matrix(n)
    # without the swap layer the ladder reads its input register bit-reversed
    np.testing.assert_allclose(psi, f[:, bit_reverse(k, n)], atol=1e-12)
    np.testing.assert_allclose(np.abs(psi) ** 2, np.abs(f[:, k]) ** 2, atol=1e-12)


def test_qft_with_swaps_is_reversal_conjugated_dft():
    n = 4
    u = dense_unitary(build_qft(n, include_swaps=True))
    f = dft_matrix(n)
    r = np.zeros((2**n, 2**n))
    for i in range(2**n):
        r[bit_reverse(i, n), i] = 1
    np.testing.assert_allclose(u, r @ f @ r, atol=1e-12)


def test_gate_validation():
    with pytest.raises(CircuitError):
        Gate("CX", (0,))
    with pytest.raises(CircuitError):
        Gate("CX", (1, 1))
    with pytest.raises(CircuitError):
        Gate("RX", (0,))
    with pytest.raises(CircuitError):
        Gate("H", (0,), theta=1.0)
    with pytest.raises(CircuitError):
        Gate("U1", (0,), unitary=np.array([[1, 1], [0, 1]]))
    with pytest.raises(CircuitError):
        Gate("FOO", (0,))
    with pytest.raises(CircuitError):
        Gate("X", (0,), condition=(0, 2))


def test_circuit_bounds():
    with pytest.raises(CircuitError):
        Circuit(2, (Gate("H", (2,)),))
    with pytest.raises(CircuitError):
        Circuit(2, (Measure(3, 0),))
    with pytest.raises(CircuitError):
        Circuit(0)
    with pytest.raises(CircuitError):
        Circuit(1, (Measure(0, 1),), n_clbits=1)


def test_condition_before_use():
    lone = Circuit(1, (Gate("X", (0,), condition=(0, 1)),))
    assert lone.n_clbits == 1
    with pytest.raises(CircuitError, match="before any measure"):
        lone.check_conditions()
    ok = Circuit(1, (Measure(0, 0), Gate("X", (0,), condition=(0, 1))))
    ok.check_conditions()
    assert ok.has_mid_circuit_measurement


def test_inverse_is_adjoint():
    c = build_qaoa(3, seed=2)
    u = dense_unitary(c)
    np.testing.assert_allclose(dense_unitary(c.inverse()) @ u, np.eye(8), atol=1e-12)
    with pytest.raises(CircuitError):
        Circuit(1, (Measure(0, 0),)).inverse()


def test_measure_all_not_counted():
    c = Circuit(2, (Gate("H", (0,)), Gate("CX", (0, 1)), MeasureAll()))
    m = metrics(c)
    assert (m.total_gates, m.two_qubit_gates) == (2, 1)
    assert m.as_dict()["entanglement_ratio_exact"] == "1/2"
