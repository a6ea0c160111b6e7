"""Aerts' spin quantum-machine and elastic-band Bell entity, with an exact spin-1/2 oracle."""

from .bell_harness import (
    BandEntity,
    ChshReport,
    ExpectationEstimate,
    FixedBreakBand,
    PreBrokenBand,
    QuantumSinglet,
    UniformBand,
    chsh_scenario,
    lhv_maximum,
    run_coincidence,
    run_single,
)
from .quantum_core import (
    Operator2,
    Outcome,
    SpinState,
    TwoSpinState,
    UnitVector3,
    born_probability,
    chsh_value,
    pauli_map,
    projector,
    rotation_operator,
    singlet_expectation,
    singlet_state,
    state_from_direction,
)
from .sqm_engine import (
    Epsilon,
    FixedPoint,
    ParticleState,
    Uniform,
    analytic_epsilon_probability,
    analytic_probability,
    run_measurement,
    run_sequence,
)
from .stats import FrequencyEstimate, ks_uniformity, z_check

__version__ = "0.1.0"
