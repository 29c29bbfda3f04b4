"""State-vector and matrix-product-state quantum circuit simulation."""

from qcsim.tensor import TruncationConfig, contract, random_unitary, svd_truncate

__version__ = "0.1.0"

__all__ = ["TruncationConfig", "contract", "random_unitary", "svd_truncate", "__version__"]
