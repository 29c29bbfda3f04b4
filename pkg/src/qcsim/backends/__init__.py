"""Simulation backends."""

from qcsim.backends.common import SampleResult, SimulationError, outcome_key
from qcsim.backends.mps import (
    MPSState,
    MPSStats,
    mps_apply,
    mps_apply_1q,
    mps_apply_2q,
    mps_init,
    mps_measure,
    mps_param_count,
    mps_probabilities,
    mps_run,
    mps_sample,
    mps_to_statevector,
)
from qcsim.backends.statevector import (
    StateVector,
    sv_apply,
    sv_init,
    sv_measure,
    sv_probabilities,
    sv_run,
    sv_sample,
)

BACKENDS = ("sv", "mps")

__all__ = [
    "BACKENDS", "MPSState", "MPSStats", "SampleResult", "SimulationError", "StateVector",
    "mps_apply", "mps_apply_1q", "mps_apply_2q", "mps_init", "mps_measure", "mps_param_count",
    "mps_probabilities", "mps_run", "mps_sample", "mps_to_statevector", "outcome_key",
    "sv_apply", "sv_init", "sv_measure", "sv_probabilities", "sv_run", "sv_sample",
]
