"""Transmission-scheme engines producing decode traces."""

from ._common import (
    DecodeEvent,
    DivisibilityViolation,
    PreconditionError,
    ScheduleParams,
    Scheme,
    SchemeTrace,
    SlotRecord,
    verify_recovery,
)
from .baselines import (
    bd_tdma_streams,
    ria_effective_antennas,
    ria_schedule,
    simulate_bd_tdma,
    simulate_ria,
    simulate_tdma,
)
from .haa import (
    cie_pairing,
    cie_schedule,
    ipie_schedule,
    pie_schedule,
    simulate_haa_cie_rir,
    simulate_haa_ipie_rir,
    simulate_haa_pie_rir,
)

SIMULATORS = {
    Scheme.TDMA: simulate_tdma,
    Scheme.BD_TDMA: simulate_bd_tdma,
    Scheme.RIA: simulate_ria,
    Scheme.PIE: simulate_haa_pie_rir,
    Scheme.IPIE: simulate_haa_ipie_rir,
    Scheme.CIE: simulate_haa_cie_rir,
}

# Schemes with a signal-level realisation (RIA is schedule-only).
SIGNAL_LEVEL = frozenset(SIMULATORS) - {Scheme.RIA}


def schedule_params(scheme: Scheme, config) -> ScheduleParams:
    """Period structure the engine for ``scheme`` uses on ``config``."""
    if scheme is Scheme.TDMA:
        return ScheduleParams(1, 1, config.N)
    if scheme is Scheme.BD_TDMA:
        return ScheduleParams(1, 1, config.M)
    return {
        Scheme.RIA: ria_schedule,
        Scheme.PIE: pie_schedule,
        Scheme.IPIE: ipie_schedule,
        Scheme.CIE: cie_schedule,
    }[scheme](config)


def simulate(scheme: Scheme, config, dataset, rng, **kwargs) -> SchemeTrace:
    return SIMULATORS[Scheme.parse(scheme) if isinstance(scheme, str) else scheme](
        config, dataset, rng, **kwargs)


__all__ = [
    "DecodeEvent", "DivisibilityViolation", "PreconditionError", "ScheduleParams", "Scheme",
    "SchemeTrace", "SlotRecord", "verify_recovery", "simulate", "schedule_params",
    "SIMULATORS", "SIGNAL_LEVEL", "simulate_tdma", "simulate_bd_tdma", "simulate_ria",
    "simulate_haa_pie_rir", "simulate_haa_ipie_rir", "simulate_haa_cie_rir",
    "ria_schedule", "ria_effective_antennas", "bd_tdma_streams", "pie_schedule",
    "ipie_schedule", "cie_schedule", "cie_pairing",
]
