"""Gradient echo memory tomography.

Fields are numpy arrays indexed [x, y, z]; signals are indexed [kx, ky, t].
Configurations travel as JSON with SI units in the key names.
"""
from ._gemtomo import (
    AxisSpec,
    CalibParams,
    Field,
    GridSpec,
    IoError,
    NumericalError,
    PhysicsParams,
    RunConfig,
    Signal,
    ValidationError,
    coil_field,
    decoherence_envelope,
    fit_decay,
    forward_fft,
    read_field,
    read_signal,
    reconstruct,
    round_trip,
    scene,
    simulate,
    write_field,
    write_signal,
)

__all__ = [
    "AxisSpec",
    "CalibParams",
    "Field",
    "GridSpec",
    "IoError",
    "NumericalError",
    "PhysicsParams",
    "RunConfig",
    "Signal",
    "ValidationError",
    "coil_field",
    "decoherence_envelope",
    "fit_decay",
    "forward_fft",
    "read_field",
    "read_signal",
    "reconstruct",
    "round_trip",
    "scene",
    "simulate",
    "write_field",
    "write_signal",
]
