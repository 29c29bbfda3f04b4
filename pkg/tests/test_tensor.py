import math

import numpy as np
import pytest

from oracles import loop_contract
from qcsim.tensor import (
    TensorError,
    TruncationConfig,
    as_tensor,
    contract,
    random_unitary,
    svd_truncate,
)

H = np.array([[1, 1], [1, -1]]) / math.sqrt(2)


def _random_complex(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def test_as_tensor_reshape_preserves_sequence():
    t = as_tensor(np.arange(24), shape=(2, 3, 4))
    assert t.dtype == np.complex128
    assert t.shape == (2, 3, 4)
    np.testing.assert_array_equal(t.reshape(-1), np.arange(24))
    with pytest.raises(TensorError):
        as_tensor(np.arange(5), shape=(2, 3))
    with pytest.raises(TensorError):
        as_tensor(np.arange(4), shape=(0, 4))


def test_truncation_defaults():
    cfg = TruncationConfig()
    assert (cfg.max_bond, cfg.abs_cutoff, cfg.rel_cutoff) == (64, 1e-5, 1e-5)


@pytest.mark.parametrize("kwargs", [{"max_bond": 0}, {"abs_cutoff": -1.0}, {"rel_cutoff": 1.0}, {"max_bond": 2.5}])
def test_truncation_config_rejects(kwargs):
    with pytest.raises(TensorError):
        TruncationConfig(**kwargs)


def test_contract_identity():
    np.testing.assert_allclose(contract(np.eye(2), [1, 0], [(1, 0)]), [1, 0])


def test_contract_hadamard_plus_state():
    np.testing.assert_allclose(contract(H, [1, 0], [(1, 0)]), [1 / math.sqrt(2), 1 / math.sqrt(2)])


@pytest.mark.parametrize(
    "shape_a, shape_b, axes",
    [((2, 3, 4), (2, 3, 4), (0, 0)), ((2, 3, 4), (4, 2, 3), (1, 2)), ((2, 3, 4), (3, 4, 2), (2, 1))],
)
def test_contract_matches_loop_oracle(shape_a, shape_b, axes):
    rng = np.random.default_rng(11)
    a = _random_complex(rng, shape_a)
    b = _random_complex(rng, shape_b)
    got = contract(a, b, [axes])
    np.testing.assert_allclose(got, loop_contract(a, b, *axes), atol=1e-12)


def test_contract_result_axis_order():
    a = np.zeros((2, 5, 3))
    b = np.zeros((3, 7))
    assert contract(a, b, [(2, 0)]).shape == (2, 5, 7)


def test_contract_extent_mismatch():
    with pytest.raises(TensorError, match="extent mismatch"):
        contract(np.zeros((2, 3)), np.zeros((4, 2)), [(1, 0)])
    with pytest.raises(TensorError):
        contract(np.zeros((2, 3)), np.zeros((3, 2)), [(5, 0)])


def test_contract_bilinear():
    rng = np.random.default_rng(3)
    for _ in range(10):
        a = _random_complex(rng, (3, 4))
        b = _random_complex(rng, (4, 5))
        alpha = complex(*rng.standard_normal(2))
        np.testing.assert_allclose(
            contract(alpha * a, b, [(1, 0)]), alpha * contract(a, b, [(1, 0)]), atol=1e-12
        )


def test_svd_cutoff_rule_keeps_two():
    m = np.diag([1.0, 0.5, 1e-6])
    res = svd_truncate(m, TruncationConfig(max_bond=64, abs_cutoff=1e-5, rel_cutoff=0.0))
    assert res.kept_rank == 2
    assert res.discarded_weight == pytest.approx(1e-12)


def test_svd_cutoff_boundary_is_kept():
    m = np.diag([1.0, 1e-5])
    res = svd_truncate(m, TruncationConfig(abs_cutoff=1e-5, rel_cutoff=0.0))
    assert res.kept_rank == 2


def test_svd_relative_cutoff():
    m = np.diag([10.0, 1e-3, 1e-5])
    res = svd_truncate(m, TruncationConfig(abs_cutoff=0.0, rel_cutoff=1e-3))
    assert res.kept_rank == 1


def test_svd_always_keeps_one():
    res = svd_truncate(np.diag([1e-9, 1e-10]), TruncationConfig())
    assert res.kept_rank == 1


def test_svd_unitary_keeps_everything():
    u = random_unitary(4, 5)
    res = svd_truncate(u)
    assert res.kept_rank == 4
    assert res.discarded_weight == pytest.approx(0.0, abs=1e-24)
    np.testing.assert_allclose(res.s, np.ones(4), atol=1e-12)


def test_svd_rejects_non_matrix():
    with pytest.raises(TensorError):
        svd_truncate(np.zeros((2, 2, 2)))


def test_svd_truncated_error_matches_eigen_oracle():
    rng = np.random.default_rng(8)
    m = _random_complex(rng, (8, 8))
    res = svd_truncate(m, TruncationConfig(max_bond=3, abs_cutoff=0.0, rel_cutoff=0.0))
    # singular values squared are the eigenvalues of m^H m, computed independently
    eig = np.sort(np.linalg.eigvalsh(m.conj().T @ m))[::-1]
    dropped = float(eig[3:].sum())
    gap = np.linalg.norm(m - res.reconstruct()) ** 2
    assert res.kept_rank == 3
    assert res.discarded_weight == pytest.approx(dropped, rel=1e-10)
    assert gap == pytest.approx(dropped, rel=1e-10)
    np.testing.assert_allclose(res.s**2, eig[:3], rtol=1e-10)


@pytest.mark.parametrize("shape", [(5, 5), (3, 7), (9, 2)])
def test_svd_exact_reconstruction(shape):
    rng = np.random.default_rng(sum(shape))
    m = _random_complex(rng, shape)
    res = svd_truncate(m, TruncationConfig.exact(max(shape)))
    assert np.linalg.norm(res.reconstruct() - m) <= 1e-10 * np.linalg.norm(m)
    assert np.all(np.diff(res.s) <= 1e-12)
    assert res.kept_rank <= min(shape)


def test_svd_discarded_weight_monotone_in_max_bond():
    rng = np.random.default_rng(21)
    m = _random_complex(rng, (10, 12))
    weights = [svd_truncate(m, TruncationConfig.exact(chi)).discarded_weight for chi in range(1, 11)]
    assert all(b <= a + 1e-12 for a, b in zip(weights, weights[1:]))
    assert weights[-1] == 0.0


@pytest.mark.parametrize("dim", [2, 3, 4, 8])
def test_random_unitary_is_unitary(dim):
    u = random_unitary(dim, np.random.default_rng(dim))
    np.testing.assert_allclose(u.conj().T @ u, np.eye(dim), atol=1e-12)
    np.testing.assert_allclose(u @ u.conj().T, np.eye(dim), atol=1e-12)


def test_random_unitary_deterministic():
    np.testing.assert_array_equal(random_unitary(4, 123), random_unitary(4, 123))
    assert not np.allclose(random_unitary(4, 123), random_unitary(4, 124))


def test_random_unitary_rejects_small_dim():
    with pytest.raises(TensorError):
        random_unitary(1, 0)


def test_random_unitary_haar_trace_moment():
    # Haar on U(d), d >= 2: E|tr U|^2 = 1 and Var|tr U|^2 = 1
    rng = np.random.default_rng(2024)
    samples = np.array([abs(np.trace(random_unitary(4, rng))) ** 2 for _ in range(1000)])
    assert abs(samples.mean() - 1.0) <= 3 / math.sqrt(1000)


def test_random_unitary_entry_distribution():
    # for Haar U(2), |U_00|^2 is Uniform(0, 1): mean 1/2, second moment 1/3
    rng = np.random.default_rng(77)
    x = np.array([abs(random_unitary(2, rng)[0, 0]) ** 2 for _ in range(2000)])
    assert abs(x.mean() - 1 / 2) <= 3 * math.sqrt(1 / 12 / 2000)
    assert abs((x**2).mean() - 1 / 3) <= 3 * math.sqrt(4 / 45 / 2000)
