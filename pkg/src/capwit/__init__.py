"""Capacity witness toolkit for correlated two-qubit Pauli channels."""

from .channels import (
    ChannelParams,
    FitResult,
    KrausChannel,
    PauliChannel,
    Schedule,
    apply,
    as_kraus,
    channel_from_spec,
    channel_to_schedules,
    channel_to_spec,
    choi,
    correlated_channel,
    fit_channel,
    marginal,
    schedule_to_channel,
    theory_correlators,
)
from .capacity import (
    CapacityReport,
    coherent_information,
    dephasing_capacity,
    exact_capacity,
    pauli_coherent_information,
    theory_report,
)
from .errors import CapwitError, ConfigError, DataError, DomainError, ValidationError

__version__ = "0.1.0"

__all__ = [
    "CapacityReport",
    "CapwitError",
    "ChannelParams",
    "ConfigError",
    "DataError",
    "DomainError",
    "FitResult",
    "KrausChannel",
    "PauliChannel",
    "Schedule",
    "ValidationError",
    "apply",
    "as_kraus",
    "channel_from_spec",
    "channel_to_schedules",
    "channel_to_spec",
    "choi",
    "coherent_information",
    "correlated_channel",
    "dephasing_capacity",
    "exact_capacity",
    "fit_channel",
    "marginal",
    "pauli_coherent_information",
    "schedule_to_channel",
    "theory_correlators",
    "theory_report",
]
