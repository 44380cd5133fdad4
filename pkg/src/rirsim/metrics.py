"""Degree-of-delay and degree-of-freedom metrics, closed forms and relay/user cost.

Delays are counted in coherence slots, so DoD is dimensionless. All closed
forms are evaluated in exact rational arithmetic and rounded once, which
lets event-driven and closed-form values be compared bit for bit.
"""

from __future__ import annotations

import warnings
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .model import NetworkConfig, ceil_div
from .schemes import DecodeEvent, Scheme


class EmptyEventList(ValueError):
    pass


class DivisibilityWarning(UserWarning):
    """Closed form evaluated on a data set that does not fill whole periods."""


@dataclass(frozen=True)
class DsfTable:
    """Delay-sensitivity factor ``(P - p + 1) / P`` for priority ``p`` in ``1..P``."""

    P: int = 5

    def dsf(self, p: int) -> Fraction:
        if not 1 <= p <= self.P:
            raise ValueError(f"priority {p} outside 1..{self.P}")
        return Fraction(self.P - p + 1, self.P)


@dataclass
class DodReport:
    dod: float
    d_sum: float
    num: int
    per_priority_breakdown: dict[int, float] = field(default_factory=dict)
    exact: Fraction = Fraction(0)


def event_dod(events: Iterable[DecodeEvent], table: DsfTable = DsfTable()) -> DodReport:
    """Priority-weighted mean waiting time; a symbol decoded in slot ``t`` waited ``t - 1`` slots."""
    events = list(events)
    if not events:
        raise EmptyEventList("DoD of an empty event list is undefined")
    by_priority: dict[int, Fraction] = defaultdict(Fraction)
    for ev in events:
        by_priority[ev.priority] += table.dsf(ev.priority) * (ev.decode_slot - 1)
    total = sum(by_priority.values(), Fraction(0))
    exact = total / len(events)
    return DodReport(float(exact), float(total), len(events),
                     {p: float(v) for p, v in sorted(by_priority.items())}, exact)


# -- closed forms ------------------------------------------------------------

def _per_slot_dod(A: int, B: int, rate: Fraction | int) -> Fraction:
    # symbols decoded at a constant ``rate`` per slot, priority 1 first
    n = A + B
    return (Fraction(4 * A * A, 10 * n) / rate + Fraction(n, 10) / rate
            - Fraction(5 * A + B, 10 * n))


def ria_phi_bar(config: NetworkConfig) -> int:
    m_eff = min(config.M, 2 * config.N)
    return config.K * (config.N // (m_eff - config.N))


def haa_phi(config: NetworkConfig, clusters: int) -> int:
    """Phase-1 length of PIE (``clusters=2``) and IPIE (``clusters=K``); 0 when single-phase."""
    c = ceil_div(config.M, clusters)
    return config.N // (c - config.N) if c > config.N else 0


def cie_phi(config: NetworkConfig) -> int:
    return config.K * (config.N // (config.M - 2 * config.N)) if config.M > 2 * config.N else 0


def _period_unit(scheme: Scheme, config: NetworkConfig) -> int:
    """Symbols per period implied by the closed form of ``scheme``."""
    K, M, N = config.K, config.M, config.N
    if scheme is Scheme.TDMA:
        return N
    if scheme is Scheme.BD_TDMA:
        return M
    if scheme is Scheme.RIA:
        return (ria_phi_bar(config) + K) * N
    if scheme is Scheme.PIE:
        return min(2 * N, M) * (haa_phi(config, 2) + 1)
    if scheme is Scheme.IPIE:
        return min(K * N, M) * (haa_phi(config, K) + 1)
    if ceil_div(M, 2) > N:
        return 2 * N * cie_phi(config) + K * N
    return M


def closed_form_divisible(scheme: Scheme, config: NetworkConfig, A: int, B: int) -> bool:
    """Whether ``A`` and ``B`` each fill whole periods.

    The closed forms sum per-slot delays with every priority-1 symbol ahead
    of every priority-5 one; a period straddling the boundary breaks that.
    """
    unit = _period_unit(Scheme.parse(scheme), config)
    return A % unit == 0 and B % unit == 0


def closed_form_dod_exact(scheme: Scheme, config: NetworkConfig, A: int, B: int) -> Fraction:
    scheme = Scheme.parse(scheme)
    if A < 0 or B < 0 or A + B < 1:
        raise ValueError(f"need A, B >= 0 and A + B >= 1, got A={A}, B={B}")
    if not closed_form_divisible(scheme, config, A, B):
        warnings.warn(f"{scheme} at {config}: A={A}, B={B} do not fill whole periods",
                      DivisibilityWarning, stacklevel=3)
    K, M, N = config.K, config.M, config.N
    n = A + B
    if scheme is Scheme.TDMA:
        return _per_slot_dod(A, B, N)
    if scheme is Scheme.BD_TDMA:
        return _per_slot_dod(A, B, M)
    if scheme is Scheme.PIE:
        return _per_slot_dod(A, B, min(2 * N, M))
    if scheme is Scheme.IPIE:
        return _per_slot_dod(A, B, min(K * N, M))
    if scheme is Scheme.RIA:
        pb = ria_phi_bar(config)
        per = (pb + K) * N
        return (Fraction((pb + 1) * n, 10 * per) + Fraction(4 * (pb + 1) * A * A, 10 * per * n)
                + Fraction((pb - 1) * (5 * A + B), 10 * n))
    if ceil_div(M, 2) > N:
        phi = cie_phi(config)
        per = 2 * N * phi + K * N
        return (Fraction(4 * (phi + 1) * A * A, 10 * per * n) + Fraction((phi + 1) * n, 10 * per)
                - Fraction((5 * A + B) * (phi + 1), 10 * n))
    return _per_slot_dod(A, B, M)


def closed_form_dod(scheme: Scheme, config: NetworkConfig, A: int, B: int) -> float:
    """Closed-form DoD of ``scheme`` for ``A`` priority-1 and ``B`` priority-5 symbols.

    Non-divisible data sets still evaluate but raise a
    :class:`DivisibilityWarning`.
    """
    return float(closed_form_dod_exact(scheme, config, A, B))


def closed_form_dof_exact(scheme: Scheme, config: NetworkConfig) -> Fraction:
    scheme = Scheme.parse(scheme)
    K, M, N = config.K, config.M, config.N
    if scheme is Scheme.TDMA:
        return Fraction(N)
    if scheme is Scheme.BD_TDMA:
        return Fraction(M)
    if scheme is Scheme.RIA:
        pb = ria_phi_bar(config)
        return Fraction((pb + K) * N, pb + 1)
    if scheme is Scheme.PIE:
        return Fraction(min(2 * N, M))
    if scheme is Scheme.IPIE:
        return Fraction(min(K * N, M))
    if ceil_div(M, 2) <= N:
        return Fraction(M)
    phi = cie_phi(config)
    return Fraction(2 * N * phi + K * N, phi + 1)


def closed_form_dof(scheme: Scheme, config: NetworkConfig) -> float:
    return float(closed_form_dof_exact(scheme, config))


def dof_gain(scheme: Scheme, config: NetworkConfig, baseline: Scheme = Scheme.RIA) -> float:
    """DoF improvement over ``baseline`` in units of the single-user (TDMA) DoF ``N``."""
    diff = closed_form_dof_exact(scheme, config) - closed_form_dof_exact(baseline, config)
    return float(diff / closed_form_dof_exact(Scheme.TDMA, config))


# -- computational cost ------------------------------------------------------

@dataclass(frozen=True)
class ComplexityReport:
    """Multiplications per unit time at the relay and at one user.

    A node that plays no part in the scheme reports cost 0 with its
    ``*_applicable`` flag cleared.
    """

    relay_cost: float
    user_cost: float
    condition_branch: str
    relay_applicable: bool = True
    user_applicable: bool = True


def complexity(scheme: Scheme, config: NetworkConfig) -> ComplexityReport:
    scheme = Scheme.parse(scheme)
    K, M, N = config.K, config.M, config.N
    half_up, half_down = ceil_div(M, 2), M // 2
    if scheme is Scheme.RIA:
        if M <= 2 * N:
            return ComplexityReport(0.0, float((N // (M - N)) ** 3 * M ** 3), "M <= 2N",
                                    relay_applicable=False)
        return ComplexityReport(0.0, float(M ** 3), "M > 2N", relay_applicable=False)
    if scheme is Scheme.PIE:
        if half_up <= N:
            return ComplexityReport(float(2 * half_down * N ** 5), float(half_up ** 3), "ceil(M/2) <= N")
        return ComplexityReport(float((2 * half_down + 2) * N ** 5), float(N ** 3), "ceil(M/2) > N")
    if scheme is Scheme.IPIE:
        c = ceil_div(M, K)
        base = (K * N) ** 6 * M ** 2
        if c <= N:
            return ComplexityReport(float(base), float(c ** 3), "ceil(M/K) <= N")
        return ComplexityReport(float(base + K * N ** 5), float(N ** 3), "ceil(M/K) > N")
    if scheme is Scheme.CIE:
        if half_up <= N:
            return ComplexityReport(float(2 * half_down * N ** 5), float(half_up ** 3), "ceil(M/2) <= N")
        return ComplexityReport(float((2 * half_down + K) * N ** 5), float(N ** 3), "ceil(M/2) > N")
    return ComplexityReport(0.0, 0.0, "not tabulated", relay_applicable=False, user_applicable=False)
