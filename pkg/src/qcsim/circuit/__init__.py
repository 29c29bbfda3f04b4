"""Circuit IR, benchmark circuit builders and QASM-subset I/O."""

from qcsim.circuit.builders import (
    BUILDERS,
    build,
    build_counterfeit_coin,
    build_ghz,
    build_qaoa,
    build_qft,
    build_quantum_volume,
)
from qcsim.circuit.ir import Circuit, CircuitError, CircuitMetrics, Gate, Measure, MeasureAll, metrics
from qcsim.circuit.qasm import QasmError, emit_qasm, parse_qasm_subset

__all__ = [
    "BUILDERS", "Circuit", "CircuitError", "CircuitMetrics", "Gate", "Measure", "MeasureAll",
    "QasmError", "build", "build_counterfeit_coin", "build_ghz", "build_qaoa", "build_qft",
    "build_quantum_volume", "emit_qasm", "metrics", "parse_qasm_subset",
]
