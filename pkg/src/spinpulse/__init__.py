"""Synthesis and verification of noise-compensating spin-1/2 control pulses."""

from .conditions import (
    CheckReport,
    SystemLayout,
    assemble_system,
    check_record,
    design_residual_components,
    moment_integrals,
    third_moment_integrals,
)
from .noise import NoiseModel, ou_dephasing_paths, static_vectors
from .pulses import (
    CompositeFmSpec,
    ContinuousAmSpec,
    FmSpec,
    ParseError,
    PiecewiseAmSpec,
    PulseRecord,
    eval_control,
    export_waveform,
    load_catalog,
    load_record,
    parse_record,
    serialize_record,
    time_reverse,
)
from .synthesis import (
    CompositeResult,
    SynthesisResult,
    compose_forward_reversed,
    fm_minimize_pipeline,
    minimized_record,
    synthesize,
    synthesize_cold,
)
from .trajectory import propagate, sample_quaternions
from .verify import (
    AveragingConsistency,
    VerificationReport,
    average_deviation,
    averaging_consistency,
    map_deviation,
    scaling_exponent,
    simulate_exact,
)

__version__ = "0.1.0"

__all__ = [
    "AveragingConsistency",
    "CheckReport",
    "CompositeFmSpec",
    "CompositeResult",
    "ContinuousAmSpec",
    "FmSpec",
    "NoiseModel",
    "ParseError",
    "PiecewiseAmSpec",
    "PulseRecord",
    "SynthesisResult",
    "SystemLayout",
    "VerificationReport",
    "assemble_system",
    "average_deviation",
    "averaging_consistency",
    "check_record",
    "compose_forward_reversed",
    "design_residual_components",
    "eval_control",
    "export_waveform",
    "fm_minimize_pipeline",
    "load_catalog",
    "load_record",
    "map_deviation",
    "minimized_record",
    "moment_integrals",
    "ou_dephasing_paths",
    "parse_record",
    "propagate",
    "sample_quaternions",
    "scaling_exponent",
    "serialize_record",
    "simulate_exact",
    "static_vectors",
    "synthesize",
    "synthesize_cold",
    "third_moment_integrals",
    "time_reverse",
]
