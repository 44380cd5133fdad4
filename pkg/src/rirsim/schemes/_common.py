from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from ..model import (
    MAX_RESAMPLES,
    ClusterPlan,
    ConfigError,
    NetworkConfig,
    ResampleLimitExceeded,
    SlotChannels,
    Symbol,
    draw_slot_channels,
)
from ..numerics import Singular


class Scheme(str, enum.Enum):
    TDMA = "TDMA"
    BD_TDMA = "BD-TDMA"
    RIA = "RIA"
    PIE = "HAA-PIE-RIR"
    IPIE = "HAA-IPIE-RIR"
    CIE = "HAA-CIE-RIR"

    @classmethod
    def parse(cls, name: str) -> "Scheme":
        if isinstance(name, cls):
            return name
        key = name.strip().upper().replace("_", "-")
        for s in cls:
            if key in (s.value, s.name.replace("_", "-"), s.value.replace("HAA-", "").replace("-RIR", "")):
                return s
        raise ConfigError(f"unknown scheme {name!r}; choose from {', '.join(s.value for s in cls)}")

    def __str__(self):
        return self.value


class DivisibilityViolation(ConfigError):
    """The data set does not split into whole periods of the scheme."""


class PreconditionError(ConfigError):
    """The scheme cannot run on this network configuration."""


@dataclass(frozen=True)
class DecodeEvent:
    symbol_id: int
    priority: int
    decode_slot: int
    tx_slot: int


@dataclass(frozen=True)
class ScheduleParams:
    phase1_slots: int
    period_slots: int
    symbols_per_period: int
    two_phase: bool = False


@dataclass
class SlotRecord:
    slot: int
    phase: int
    sent: list[int]
    interference_residual: float = 0.0


@dataclass
class SchemeTrace:
    scheme: Scheme
    slots_used: int = 0
    events: list[DecodeEvent] = field(default_factory=list)
    max_recovery_error: float | None = None
    resamples: int = 0
    signal_level: bool = True
    padded: bool = False
    transmitted: dict[int, complex] = field(default_factory=dict)
    recovered: dict[int, complex] = field(default_factory=dict)
    slots: list[SlotRecord] = field(default_factory=list)

    @property
    def decoded(self) -> int:
        return len(self.events)

    @property
    def dof_empirical(self) -> float:
        return self.decoded / self.slots_used

    @property
    def max_interference_residual(self) -> float:
        return max((r.interference_residual for r in self.slots), default=0.0)

    def decode(self, sym: Symbol, slot: int, tx_slot: int, estimate: complex | None = None):
        if sym.id < 0:
            return
        self.events.append(DecodeEvent(sym.id, sym.priority, slot, tx_slot))
        if estimate is not None:
            self.transmitted[sym.id] = sym.payload
            self.recovered[sym.id] = complex(estimate)


def verify_recovery(trace: SchemeTrace) -> float:
    """Worst relative error ``|recovered - sent| / max(1, |sent|)`` in a trace."""
    worst = 0.0
    for sid, est in trace.recovered.items():
        sent = trace.transmitted[sid]
        worst = max(worst, abs(est - sent) / max(1.0, abs(sent)))
    return worst


def finish(trace: SchemeTrace) -> SchemeTrace:
    if trace.signal_level:
        trace.max_recovery_error = verify_recovery(trace)
    trace.events.sort(key=lambda e: (e.decode_slot, e.symbol_id))
    return trace


def check_divisible(what: str, counts: dict[str, int], unit: int, strict: bool) -> bool:
    """Return whether every count is a multiple of ``unit``; raise if strict."""
    bad = {k: v for k, v in counts.items() if v % unit}
    if bad and strict:
        detail = ", ".join(f"{k}={v}" for k, v in bad.items())
        raise DivisibilityViolation(f"{what}: {detail} not divisible by {unit}")
    return not bad


def payloads(symbols: list[Symbol]) -> np.ndarray:
    return np.array([s.payload for s in symbols], dtype=np.complex128)


class ChannelSource:
    """Draws slot channels and retries slot bodies that hit a singular solve.

    ``stale_relay=True`` hands the relay the previous slot's realisation
    instead of the current one, i.e. fully outdated CSI.
    """

    def __init__(self, config: NetworkConfig, plan: ClusterPlan, rng: np.random.Generator,
                 relay_omni: int | None = None, stale_relay: bool = False):
        self.config, self.plan, self.rng = config, plan, rng
        self.relay_omni = relay_omni
        self.stale_relay = stale_relay
        self.resamples = 0
        self._previous: SlotChannels | None = None

    def _draw(self) -> SlotChannels:
        ch = draw_slot_channels(self.config, self.plan, self.rng, self.relay_omni)
        self.resamples += ch.resamples
        return ch

    def run(self, body):
        """Call ``body(true_channels, relay_view)`` on a fresh draw."""
        for _ in range(MAX_RESAMPLES + 1):
            ch = self._draw()
            if self.stale_relay:
                view = self._previous if self._previous is not None else self._draw()
            else:
                view = ch
            try:
                out = body(ch, view)
            except Singular:
                self.resamples += 1
                continue
            self._previous = ch
            return out
        raise ResampleLimitExceeded(f"{MAX_RESAMPLES} consecutive singular slots for {self.config}")
