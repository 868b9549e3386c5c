"""Quantum solver for the 1-D Poisson equation, with exact noisy simulation."""
from .analysis import (
    DeviationReport,
    SweepConfig,
    circuit_metrics,
    deviation,
    find_threshold,
    run_sweep,
    sweep_schedule,
)
from .core import (
    DensityMatrix,
    StateVector,
    apply_kraus,
    apply_unitary,
    basis_probability,
)
from .gates import Circuit, CircuitError, GateKind, GateOp
from .noise import (
    KrausChannel,
    amplitude_damping,
    bit_flip,
    channel_by_name,
    composite,
    depolarizing,
    phase_damping,
)
from .poisson import (
    PoissonInstance,
    build_add_one,
    build_ry_ladder,
    build_sine_transform,
    build_solver,
    builtin_instance,
    eigen_recip,
    prepare_b_state,
    solve,
)
from .qasm import ParseError, ParseErrorKind, parse, serialize
from .sim import (
    NoiseModel,
    outcome_distribution,
    post_select,
    run_ideal,
    run_noisy,
    sample,
)

__version__ = "0.1.0"

__all__ = [
    "DensityMatrix",
    "StateVector",
    "apply_kraus",
    "apply_unitary",
    "basis_probability",
    "Circuit",
    "CircuitError",
    "GateKind",
    "GateOp",
    "KrausChannel",
    "amplitude_damping",
    "bit_flip",
    "channel_by_name",
    "composite",
    "depolarizing",
    "phase_damping",
    "PoissonInstance",
    "build_add_one",
    "build_ry_ladder",
    "build_sine_transform",
    "build_solver",
    "eigen_recip",
    "builtin_instance",
    "prepare_b_state",
    "solve",
    "ParseError",
    "ParseErrorKind",
    "parse",
    "serialize",
    "NoiseModel",
    "outcome_distribution",
    "post_select",
    "run_ideal",
    "run_noisy",
    "sample",
    "DeviationReport",
    "SweepConfig",
    "circuit_metrics",
    "deviation",
    "find_threshold",
    "run_sweep",
    "sweep_schedule",
]
