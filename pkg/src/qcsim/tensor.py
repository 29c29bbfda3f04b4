"""Dense complex tensors and the linear-algebra kernels shared by both backends.

Tensors are plain ``numpy`` arrays of ``complex128`` in row-major order. The
helpers here add the validation and truncation bookkeeping that the simulators
rely on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

ComplexTensor = NDArray[np.complex128]

DEFAULT_MAX_BOND = 64
DEFAULT_ABS_CUTOFF = 1e-5
DEFAULT_REL_CUTOFF = 1e-5


class TensorError(ValueError):
    """Raised for malformed tensor arguments."""


def as_tensor(data: ArrayLike, shape: Sequence[int] | None = None) -> ComplexTensor:
    """Convert ``data`` to a C-contiguous complex128 array.

    If ``shape`` is given the flat data sequence is reshaped to it; the number
    of stored values must match exactly.
    """
    arr = np.ascontiguousarray(data, dtype=np.complex128)
    if shape is not None:
        shape = tuple(int(s) for s in shape)
        if any(s <= 0 for s in shape):
            raise TensorError(f"extents must be positive, got {shape}")
        if math.prod(shape) != arr.size:
            raise TensorError(f"cannot view {arr.size} values as shape {shape}")
        arr = arr.reshape(shape)
    return arr


@dataclass(frozen=True)
class TruncationConfig:
    """Controls which singular values survive a two-site split.

    Attributes:
        max_bond: Largest number of singular values kept per split.
        abs_cutoff: Singular values strictly below this are dropped.
        rel_cutoff: Singular values with ``s / s_max`` strictly below this are dropped.
    """

    max_bond: int = DEFAULT_MAX_BOND
    abs_cutoff: float = DEFAULT_ABS_CUTOFF
    rel_cutoff: float = DEFAULT_REL_CUTOFF

    def __post_init__(self) -> None:
        if int(self.max_bond) != self.max_bond or self.max_bond < 1:
            raise TensorError(f"max_bond must be a positive integer, got {self.max_bond}")
        if not self.abs_cutoff >= 0:
            raise TensorError(f"abs_cutoff must be non-negative, got {self.abs_cutoff}")
        if not 0 <= self.rel_cutoff < 1:
            raise TensorError(f"rel_cutoff must lie in [0, 1), got {self.rel_cutoff}")

    @classmethod
    def exact(cls, max_bond: int) -> TruncationConfig:
        """Zero cutoffs, so only ``max_bond`` can truncate."""
        return cls(max_bond=max_bond, abs_cutoff=0.0, rel_cutoff=0.0)


@dataclass(frozen=True)
class TruncatedSVDResult:
    """Outcome of :func:`svd_truncate`.

    ``u @ np.diag(s) @ v`` approximates the input matrix; the squared
    Frobenius error equals ``discarded_weight``.
    """

    u: ComplexTensor
    s: NDArray[np.float64]
    v: ComplexTensor
    kept_rank: int
    discarded_weight: float

    def reconstruct(self) -> ComplexTensor:
        return (self.u * self.s) @ self.v


def contract(a: ArrayLike, b: ArrayLike, paired_axes: Sequence[tuple[int, int]]) -> ComplexTensor:
    """Sum over paired axes of ``a`` and ``b``.

    Args:
        a: First tensor.
        b: Second tensor.
        paired_axes: ``(axis_of_a, axis_of_b)`` pairs to contract.

    Returns:
        Tensor whose axes are the free axes of ``a`` followed by the free axes
        of ``b``, each group in its original order.

    Raises:
        TensorError: If a paired axis is out of range, repeated, or the two
            extents differ.
    """
    a = as_tensor(a)
    b = as_tensor(b)
    axes_a = [int(p[0]) for p in paired_axes]
    axes_b = [int(p[1]) for p in paired_axes]
    for ax, ndim, name in ((axes_a, a.ndim, "a"), (axes_b, b.ndim, "b")):
        norm = [x % ndim if -ndim <= x < ndim else None for x in ax]
        if None in norm:
            raise TensorError(f"axis out of range for {name} with ndim {ndim}: {ax}")
        if len(set(norm)) != len(norm):
            raise TensorError(f"repeated axis for {name}: {ax}")
    for i, j in zip(axes_a, axes_b):
        if a.shape[i] != b.shape[j]:
            raise TensorError(
                f"extent mismatch on paired axes a[{i}]={a.shape[i]} vs b[{j}]={b.shape[j]}"
            )
    return np.tensordot(a, b, axes=(axes_a, axes_b))


def truncation_rank(s: NDArray[np.float64], cfg: TruncationConfig) -> int:
    """Number of leading singular values kept under ``cfg`` (at least one)."""
    if s.size == 0:
        return 0
    keep = (s >= cfg.abs_cutoff) & (s >= cfg.rel_cutoff * s[0])
    keep[cfg.max_bond:] = False
    # s is sorted, so the mask is a prefix; argmin finds the first False
    rank = int(np.argmin(keep)) if not keep.all() else int(s.size)
    return max(rank, 1)


def svd_truncate(m: ArrayLike, cfg: TruncationConfig | None = None) -> TruncatedSVDResult:
    """Thin SVD of a matrix followed by truncation.

    A singular value ``s_i`` is kept when ``i < max_bond``, ``s_i >= abs_cutoff``
    and ``s_i / s_0 >= rel_cutoff``. The leading value is always kept.

    Raises:
        TensorError: If ``m`` is not a matrix.
        numpy.linalg.LinAlgError: If the SVD does not converge.
    """
    cfg = cfg or TruncationConfig()
    m = as_tensor(m)
    if m.ndim != 2:
        raise TensorError(f"svd_truncate expects a matrix, got ndim={m.ndim}")
    try:
        u, s, vh = np.linalg.svd(m, full_matrices=False)
    except np.linalg.LinAlgError:
        # gesdd occasionally fails on ill-conditioned input where gesvd succeeds
        import scipy.linalg

        u, s, vh = scipy.linalg.svd(m, full_matrices=False, lapack_driver="gesvd")
    rank = truncation_rank(s, cfg)
    dropped = s[rank:]
    return TruncatedSVDResult(
        u=np.ascontiguousarray(u[:, :rank]),
        s=s[:rank].copy(),
        v=np.ascontiguousarray(vh[:rank, :]),
        kept_rank=rank,
        discarded_weight=float(np.dot(dropped, dropped)),
    )


def random_unitary(dim: int, rng: np.random.Generator | int | None = None) -> ComplexTensor:
    """Haar-random ``dim x dim`` unitary.

    QR-decomposes a complex Ginibre matrix and fixes the phases of R's diagonal
    so the distribution is exactly Haar.
    """
    if int(dim) != dim or dim < 2:
        raise TensorError(f"dim must be an integer >= 2, got {dim}")
    rng = np.random.default_rng(rng)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    phases = d / np.abs(d)
    return np.ascontiguousarray(q * phases)
