import math

import numpy as np
import pytest
from scipy import stats

from oracles import bit_reverse, branch_distribution, dense_state, dft_matrix, random_circuit
from qcsim.backends import SimulationError, sv_apply, sv_init, sv_measure, sv_probabilities, sv_run, sv_sample
from qcsim.bench.memory import InfeasibleSimulation, parse_bytes
from qcsim.circuit import Circuit, Gate, Measure, MeasureAll, build_counterfeit_coin, build_ghz, build_qft

S = 1 / math.sqrt(2)


def test_init():
    np.testing.assert_array_equal(sv_init(1).amplitudes, [1, 0])
    amps = sv_init(3).amplitudes
    assert amps.shape == (8,)
    assert amps[0] == 1 and not amps[1:].any()


def test_init_refused_above_guard():
    with pytest.raises(InfeasibleSimulation, match="infeasible"):
        sv_init(34, guard=parse_bytes("96GiB"))


def test_hadamard():
    state = sv_apply(sv_init(1), Gate("H", (0,)))
    np.testing.assert_allclose(state.amplitudes, [S, S])


def test_bell_state():
    state = sv_run(build_ghz(2))
    np.testing.assert_allclose(state.amplitudes, [S, 0, 0, S], atol=1e-15)


def test_little_endian_order():
    state = sv_apply(sv_init(3), Gate("X", (1,)))
    assert np.argmax(np.abs(state.amplitudes)) == 0b010
    sv_apply(state, Gate("CX", (1, 2)))
    assert np.argmax(np.abs(state.amplitudes)) == 0b110


@pytest.mark.parametrize("n", [2, 3, 5])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_random_circuit_matches_dense_oracle(n, seed):
    c = random_circuit(n, 25, np.random.default_rng(seed))
    np.testing.assert_allclose(sv_run(c).amplitudes, dense_state(c), atol=1e-12)


def test_norm_preserved_every_gate():
    rng = np.random.default_rng(5)
    for n in (3, 7, 10):
        c = random_circuit(n, 50, rng)
        state = sv_init(n)
        for g in c.ops:
            sv_apply(state, g)
            assert abs(state.norm() - 1) <= 1e-10


def test_gate_then_inverse_restores_state():
    rng = np.random.default_rng(9)
    c = random_circuit(6, 40, rng)
    state = sv_init(6)
    for g in c.ops:
        before = state.amplitudes.copy()
        sv_apply(state, g)
        sv_apply(state, Gate("U2" if g.num_qubits == 2 else "U1", g.targets, unitary=g.matrix().conj().T))
        np.testing.assert_allclose(state.amplitudes, before, atol=1e-10)
        sv_apply(state, g)
    for g in c.inverse().ops:
        sv_apply(state, g)
    np.testing.assert_allclose(state.amplitudes, np.eye(64)[0], atol=1e-10)


def test_measure_basis_state_is_certain():
    rng = np.random.default_rng(0)
    for _ in range(20):
        state = sv_measure(sv_init(2, n_clbits=1), 0, 0, rng)
        assert state.classical_bits == [0]
        np.testing.assert_array_equal(state.amplitudes, [1, 0, 0, 0])


@pytest.mark.parametrize("qubit", [0, 1])
def test_measure_bell_statistics(qubit):
    rng = np.random.default_rng(qubit)
    outcomes = []
    for _ in range(2000):
        state = sv_measure(sv_run(build_ghz(2)), qubit, 0, rng)
        bit = state.classical_bits[0]
        outcomes.append(bit)
        expected = [1, 0, 0, 0] if bit == 0 else [0, 0, 0, 1]
        np.testing.assert_allclose(state.amplitudes, expected, atol=1e-12)
    assert abs(np.mean(outcomes) - 0.5) <= 5 * 0.5 / math.sqrt(2000)


def test_counterfeit_coin_ancilla_parity():
    # the ancilla holds the parity of three uniformly random coins
    c = build_counterfeit_coin(4)
    prefix = Circuit(4, c.ops[:6])
    probs = sv_probabilities(prefix)
    p1 = sum(p for i, p in enumerate(probs) if (i >> 3) & 1)
    assert p1 == pytest.approx(0.5, abs=1e-12)
    for i, p in enumerate(probs):
        parity = bin(i & 0b111).count("1") % 2
        assert p == pytest.approx(0.125 if parity == (i >> 3) else 0.0, abs=1e-12)
    rng = np.random.default_rng(3)
    ones = sum(sv_run(c, rng).classical_bits[0] for _ in range(4000))
    assert abs(ones / 4000 - 0.5) <= 5 * 0.5 / math.sqrt(4000)


def test_conditional_gate_requires_written_bit():
    state = sv_init(1, n_clbits=1)
    with pytest.raises(SimulationError, match="unwritten"):
        sv_apply(state, Gate("X", (0,), condition=(0, 1)))


def test_conditional_gate_applies_on_match():
    c = Circuit(2, (Gate("X", (0,)), Measure(0, 0), Gate("X", (1,), condition=(0, 1))))
    assert np.argmax(np.abs(sv_run(c, np.random.default_rng(0)).amplitudes)) == 0b11
    c = Circuit(2, (Measure(0, 0), Gate("X", (1,), condition=(0, 1))))
    assert np.argmax(np.abs(sv_run(c, np.random.default_rng(0)).amplitudes)) == 0


def test_ghz_sampling():
    r = sv_sample(build_ghz(10), 1024, seed=4)
    assert set(r.histogram) <= {"0" * 10, "1" * 10}
    assert sum(r.histogram.values()) == 1024
    assert abs(r.histogram.get("0" * 10, 0) - 512) <= 5 * math.sqrt(1024 * 0.25)


def test_x_sampling():
    r = sv_sample(Circuit(1, (Gate("X", (0,)),)), 100, seed=0)
    assert r.histogram == {"1": 100}


def test_qft_sampling_tvd():
    bits = "0110"
    n = len(bits)
    expected = np.abs(dft_matrix(n)[:, bit_reverse(int(bits, 2), n)]) ** 2
    r = sv_sample(build_qft(n, input_bits=bits), 100_000, seed=11)
    tvd = 0.5 * np.abs(r.probabilities() - expected).sum()
    assert tvd <= 0.05


def test_sampling_is_deterministic_per_seed():
    c = build_qft(5, input_bits="10011")
    assert sv_sample(c, 500, seed=2).histogram == sv_sample(c, 500, seed=2).histogram
    assert sv_sample(c, 500, seed=2).histogram != sv_sample(c, 500, seed=3).histogram


def test_probabilities_sum_to_one():
    p = sv_probabilities(build_ghz(3))
    np.testing.assert_allclose(p, [0.5, 0, 0, 0, 0, 0, 0, 0.5], atol=1e-15)
    assert p.sum() == pytest.approx(1, abs=1e-10)


def test_probabilities_reject_mid_circuit_measurement():
    with pytest.raises(SimulationError):
        sv_probabilities(build_counterfeit_coin(3))


def test_chi_square_mid_circuit_small():
    c = Circuit(
        3,
        (
            Gate("RY", (0,), theta=1.1),
            Measure(0, 0),
            Gate("H", (1,), condition=(0, 1)),
            Gate("CX", (1, 2)),
            Gate("RX", (2,), theta=0.7, condition=(0, 0)),
            MeasureAll(),
        ),
    )
    _chi_square_check(c, branch_distribution(c), 100_000, seed=21)


@pytest.mark.slow
def test_chi_square_counterfeit_coin():
    c = build_counterfeit_coin(4)
    _chi_square_check(c, branch_distribution(c), 100_000, seed=1)


def _chi_square_check(circuit, expected, shots, seed):
    r = sv_sample(circuit, shots, seed=seed)
    observed = r.probabilities() * shots
    support = expected > 1e-12
    assert observed[~support].sum() == 0
    _, pvalue = stats.chisquare(observed[support], expected[support] * shots)
    assert pvalue > 1e-3
