"""TDMA, beamformed TDMA and retrospective interference alignment baselines."""

from __future__ import annotations

import numpy as np

from ..model import (
    DataSetSpec,
    NetworkConfig,
    SymbolQueue,
    build_cluster_plan,
    make_symbols,
)
from ..numerics import mat_solve
from ._common import (
    ChannelSource,
    Scheme,
    SchemeTrace,
    ScheduleParams,
    SlotRecord,
    check_divisible,
    finish,
    payloads,
)


def ria_effective_antennas(config: NetworkConfig) -> int:
    # DoF of RIA saturates at rho = 2; surplus transmit antennas idle.
    return min(config.M, 2 * config.N)


def ria_schedule(config: NetworkConfig) -> ScheduleParams:
    K, N = config.K, config.N
    m_eff = ria_effective_antennas(config)
    phi_bar = K * (N // (m_eff - N))
    return ScheduleParams(phi_bar, phi_bar + 1, (phi_bar + K) * N, two_phase=True)


def bd_tdma_streams(config: NetworkConfig) -> list[int]:
    """Round-robin split of the ``M`` streams across users, at most ``N`` each."""
    K, M = config.K, config.M
    return [M // K + (1 if k < M % K else 0) for k in range(K)]


def simulate_tdma(config: NetworkConfig, dataset: DataSetSpec, rng: np.random.Generator, *,
                  signal: bool = True, strict: bool = True) -> SchemeTrace:
    """One user per slot, ``N`` streams through the first ``N`` base antennas."""
    N, K = config.N, config.K
    exact = check_divisible("TDMA", {"A": dataset.A, "B": dataset.B}, N, strict)
    trace = SchemeTrace(Scheme.TDMA, signal_level=signal, padded=not exact)
    queue = SymbolQueue(make_symbols(dataset, rng), rng)
    source = ChannelSource(config, build_cluster_plan(config), rng)

    def body(ch, _view, user, s):
        h = ch.base_to_user(user)[:, :N]
        return mat_solve(h, h @ s)[:, 0]

    while not queue.empty:
        slot = trace.slots_used + 1
        batch = queue.take(N)
        user = (slot - 1) % K
        est = [None] * N
        if signal:
            est = source.run(lambda ch, view: body(ch, view, user, payloads(batch)[:, None]))
        for sym, e in zip(batch, est):
            trace.decode(sym, slot, slot, e)
        trace.slots.append(SlotRecord(slot, 1, [s.id for s in batch]))
        trace.slots_used = slot
    trace.resamples = source.resamples
    return finish(trace)


def simulate_bd_tdma(config: NetworkConfig, dataset: DataSetSpec, rng: np.random.Generator, *,
                     signal: bool = True, strict: bool = True) -> SchemeTrace:
    """``M`` streams per slot, zero-forced across users with instantaneous CSIT.

    Needs ``K * N >= M`` for the signal-level realisation; below that only the
    decode schedule is produced and ``signal_level`` is False.
    """
    K, M, N = config.K, config.M, config.N
    exact = check_divisible("BD-TDMA", {"A": dataset.A, "B": dataset.B}, M, strict)
    signal = signal and K * N >= M
    trace = SchemeTrace(Scheme.BD_TDMA, signal_level=signal, padded=not exact)
    queue = SymbolQueue(make_symbols(dataset, rng), rng)
    source = ChannelSource(config, build_cluster_plan(config), rng)
    streams = bd_tdma_streams(config)

    def body(ch, _view, s):
        # ZF over the first d_k receive antennas of each user
        rows = [ch.base_to_user(k)[:d] for k, d in enumerate(streams)]
        x = mat_solve(np.vstack(rows), s)
        out = [ch.base_to_user(k)[:d] @ x for k, d in enumerate(streams)]
        return np.concatenate(out)[:, 0]

    while not queue.empty:
        slot = trace.slots_used + 1
        batch = queue.take(M)
        est = [None] * M
        if signal:
            est = source.run(lambda ch, view: body(ch, view, payloads(batch)[:, None]))
        for sym, e in zip(batch, est):
            trace.decode(sym, slot, slot, e)
        trace.slots.append(SlotRecord(slot, 1, [s.id for s in batch]))
        trace.slots_used = slot
    trace.resamples = source.resamples
    return finish(trace)


def simulate_ria(config: NetworkConfig, dataset: DataSetSpec, rng: np.random.Generator, *,
                 signal: bool = False, strict: bool = True) -> SchemeTrace:
    """Decode schedule of retrospective alignment (event level only).

    Each period spends ``phi_bar`` slots transmitting and one slot on joint
    interference management; every symbol of the period decodes in that
    last slot.
    """
    params = ria_schedule(config)
    per = params.symbols_per_period
    exact = check_divisible("RIA", {"A": dataset.A, "B": dataset.B}, per, strict)
    trace = SchemeTrace(Scheme.RIA, signal_level=False, padded=not exact)
    queue = SymbolQueue(make_symbols(dataset, rng), rng)
    per_slot = -(-per // params.phase1_slots)
    while not queue.empty:
        start = trace.slots_used
        batch = queue.take(per)
        last = start + params.period_slots
        for idx, sym in enumerate(batch):
            trace.decode(sym, last, start + 1 + idx // per_slot)
        for t in range(params.period_slots):
            sent = [s.id for s in batch[t * per_slot:(t + 1) * per_slot]] if t < params.phase1_slots else []
            trace.slots.append(SlotRecord(start + t + 1, 1 if t < params.phase1_slots else 2, sent))
        trace.slots_used = last
    return finish(trace)
