"""Genetic-algorithm synthesis of hard-pulse sequences for NMR quantum gates."""

from ._pulsega import (
    FlipErrorModel,
    GAConfig,
    ParseError,
    PulseSegment,
    PulseSequence,
    SpinSystem,
    __version__,
    default_population,
    evaluate,
    gate,
    gate_catalog,
    gate_fidelity,
    load_sequence,
    load_spin_system,
    optimize,
    parse_sequence,
    parse_spin_system,
    propagator,
    scan,
    uncoupled_system,
)

__all__ = [
    "FlipErrorModel",
    "GAConfig",
    "ParseError",
    "PulseSegment",
    "PulseSequence",
    "SpinSystem",
    "__version__",
    "default_population",
    "evaluate",
    "gate",
    "gate_catalog",
    "gate_fidelity",
    "load_sequence",
    "load_spin_system",
    "optimize",
    "parse_sequence",
    "parse_spin_system",
    "propagator",
    "scan",
    "uncoupled_system",
]
