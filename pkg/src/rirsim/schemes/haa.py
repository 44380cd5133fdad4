"""Relay-assisted schemes with a hybrid omni/directional relay array.

Three engines share the same per-slot building blocks:

* the relay decodes every base-station symbol through its own ``M x M``
  receive channel;
* its omni antennas cancel inter-user interference, either pairwise
  (PIE, CIE) or for all users at once through a stacked ``KN x KN`` inverse
  (IPIE);
* each served user whose cluster carries more than ``N`` symbols gets a
  directional erasure signal that removes the surplus symbols from its
  received vector, leaving an ``N x N`` system decoded in-slot;
* the final slot of a period (DRIR) sends every user its erased symbols on
  its own directional beam, zero-padded to ``N``.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Callable

import numpy as np

from ..model import (
    CsitClass,
    DataSetSpec,
    NetworkConfig,
    SlotChannels,
    SymbolQueue,
    build_cluster_plan,
    ceil_div,
    make_symbols,
)
from ..numerics import mat_solve
from ._common import (
    ChannelSource,
    PreconditionError,
    Scheme,
    ScheduleParams,
    SchemeTrace,
    SlotRecord,
    check_divisible,
    finish,
    payloads,
)


# -- schedules ---------------------------------------------------------------

def pie_schedule(config: NetworkConfig) -> ScheduleParams:
    if config.K != 2:
        raise PreconditionError(f"HAA-PIE-RIR serves exactly 2 users, got K={config.K}")
    return _cluster_threshold_schedule(config, ceil_div(config.M, 2), "HAA-PIE-RIR")


def ipie_schedule(config: NetworkConfig) -> ScheduleParams:
    return _cluster_threshold_schedule(config, ceil_div(config.M, config.K), "HAA-IPIE-RIR")


def _cluster_threshold_schedule(config, cluster: int, name: str) -> ScheduleParams:
    M, N = config.M, config.N
    if cluster <= N:
        return ScheduleParams(1, 1, M)
    phi = N // (cluster - N)
    if phi == 0:
        raise PreconditionError(
            f"{name} at {config}: {cluster - N} surplus symbols per user exceed N={N}, phase 1 is empty")
    return ScheduleParams(phi, phi + 1, phi * M, two_phase=True)


def cie_schedule(config: NetworkConfig) -> ScheduleParams:
    K, M, N = config.K, config.M, config.N
    if ceil_div(M, 2) <= N:
        # one full cyclic group, everything decoded in-slot
        return ScheduleParams(K, K, K * M)
    groups = N // (M - 2 * N)
    if groups == 0:
        raise PreconditionError(
            f"HAA-CIE-RIR at {config}: M - 2N = {M - 2 * N} exceeds N={N}, phase 1 is empty")
    phi = K * groups
    return ScheduleParams(phi, phi + 1, phi * M, two_phase=True)


def relay_omni_count(scheme: Scheme, config: NetworkConfig) -> int:
    return config.K * config.N if scheme is Scheme.IPIE else config.N


def required_relay_antennas(scheme: Scheme, config: NetworkConfig) -> int:
    K, M, N = config.K, config.M, config.N
    directional = {Scheme.PIE: 2 * N, Scheme.IPIE: K * N, Scheme.CIE: max(2, K) * N}[scheme]
    return max(M, relay_omni_count(scheme, config) + directional)


def _check_relay(scheme: Scheme, config: NetworkConfig):
    need = required_relay_antennas(scheme, config)
    if config.Q < need:
        raise PreconditionError(f"{scheme} at {config} needs Q >= {need} relay antennas, got {config.Q}")


# -- slot building blocks ----------------------------------------------------

def relay_decode(ch: SlotChannels, x_base: np.ndarray) -> np.ndarray:
    """Relay's estimate of every base-station symbol from ``H_BR x``."""
    return mat_solve(ch.H_BR, ch.H_BR @ x_base)


def pair_cancellation(view: SlotChannels, u1: int, u2: int, cols1: slice, cols2: slice,
                      s_hat: np.ndarray) -> np.ndarray:
    """Omni signal removing each served user's interference from the other cluster.

    ``x = -(H_R[u1]^-1 I(cluster 2 -> u1) + H_R[u2]^-1 I(cluster 1 -> u2))``
    """
    i_21 = view.base_to_user(u1)[:, cols2] @ s_hat[cols2]
    i_12 = view.base_to_user(u2)[:, cols1] @ s_hat[cols1]
    return -(mat_solve(view.H_Romni[u1], i_21) + mat_solve(view.H_Romni[u2], i_12))


def pair_equivalent_channels(ch: SlotChannels, u1: int, u2: int, cols1: slice, cols2: slice):
    """Channels seen by the two served users once the omni signal is added."""
    h1, h2 = ch.base_to_user(u1), ch.base_to_user(u2)
    hb1 = h1[:, cols1] - ch.H_Romni[u1] @ mat_solve(ch.H_Romni[u2], h2[:, cols1])
    hb2 = h2[:, cols2] - ch.H_Romni[u2] @ mat_solve(ch.H_Romni[u1], h1[:, cols2])
    return hb1, hb2


def stacked_cancellation(view: SlotChannels, s_hat_by_cluster: list[np.ndarray]) -> np.ndarray:
    """Omni signal from ``KN`` antennas cancelling every user's interference at once."""
    K = len(view.H_Romni)
    blocks = []
    for j in range(K):
        acc = np.zeros((view.H_Romni[j].shape[0], 1), dtype=np.complex128)
        for i in range(K):
            if i != j and s_hat_by_cluster[i].size:
                acc += view.H_user[i][j] @ s_hat_by_cluster[i]
        blocks.append(acc)
    return -mat_solve(view.omni_stack(), np.vstack(blocks))


def erasure_signal(view: SlotChannels, user: int, hbar: np.ndarray, s_hat: np.ndarray,
                   N: int) -> np.ndarray:
    """Directional signal cancelling the user's desired symbols beyond the first ``N``."""
    return mat_solve(view.H_Rdir[user], -hbar[:, N:] @ s_hat[N:])


def decode_in_slot(hbar: np.ndarray, y: np.ndarray, N: int) -> np.ndarray:
    """Solve for the first ``min(n, N)`` symbols on a square sub-system."""
    d = min(hbar.shape[1], N)
    return mat_solve(hbar[:d, :d], y[:d])[:, 0]


def _serve(ch, view, user, hbar_true, hbar_view, y, s_hat, N):
    n = hbar_true.shape[1]
    if n > N:
        y = y + ch.H_Rdir[user] @ erasure_signal(view, user, hbar_view, s_hat, N)
    est = decode_in_slot(hbar_true, y, N) if n else np.zeros(0, complex)
    return est, s_hat[N:, 0]


def pair_slot(ch: SlotChannels, view: SlotChannels, u1: int, u2: int, split: int,
              s: np.ndarray, N: int):
    """Two clusters serving ``u1`` and ``u2``; returns per-user results and the residual.

    Result is ``[(in-slot estimates, relay copies of erased symbols)] * 2`` and
    the largest norm of received interference left after omni cancellation.
    """
    M = s.shape[0]
    c1, c2 = slice(0, split), slice(split, M)
    s_hat = relay_decode(ch, s)
    x_r = pair_cancellation(view, u1, u2, c1, c2, s_hat)
    ys = [ch.base_to_user(u) @ s + ch.H_Romni[u] @ x_r for u in (u1, u2)]
    true = pair_equivalent_channels(ch, u1, u2, c1, c2)
    seen = true if view is ch else pair_equivalent_channels(view, u1, u2, c1, c2)
    parts = (s[c1], s[c2])
    residual = max(float(np.linalg.norm(y - hb @ p)) for y, hb, p in zip(ys, true, parts))
    out = [_serve(ch, view, u, hb, hv, y, s_hat[c], N)
           for u, hb, hv, y, c in zip((u1, u2), true, seen, ys, (c1, c2))]
    return out, residual


def stacked_slot(ch: SlotChannels, view: SlotChannels, plan, s: np.ndarray, N: int):
    """All ``K`` clusters on air with joint cancellation; same return shape as ``pair_slot``."""
    K = len(plan.sizes)
    s_hat = relay_decode(ch, s)
    cols = [plan.columns(i) for i in range(K)]
    x_r = stacked_cancellation(view, [s_hat[c] for c in cols])
    out, residual = [], 0.0
    for j in range(K):
        y = ch.base_to_user(j) @ s + ch.H_Romni[j] @ x_r
        hb = ch.H_user[j][j]
        residual = max(residual, float(np.linalg.norm(y - hb @ s[cols[j]])))
        out.append(_serve(ch, view, j, hb, view.H_user[j][j], y, s_hat[cols[j]], N))
    return out, residual


def drir_slot(ch: SlotChannels, view: SlotChannels, erased: dict[int, np.ndarray], N: int):
    """Deliver each user's erased symbols on its directional beam."""
    out = {}
    for user, vals in erased.items():
        e = len(vals)
        if e > N:
            raise RuntimeError(f"user {user} has {e} erased symbols, more than N={N}")
        v = np.zeros((N, 1), dtype=np.complex128)
        v[:e, 0] = vals
        y = ch.H_Rdir[user] @ mat_solve(view.H_Rdir[user], v)
        out[user] = y[:e, 0]
    return out


# -- engines -----------------------------------------------------------------

def _run(scheme: Scheme, config: NetworkConfig, dataset: DataSetSpec, rng: np.random.Generator,
         params: ScheduleParams, specs: list, take_sizes: Callable, slot_body: Callable, *,
         signal: bool, strict: bool, relay_csit: CsitClass) -> SchemeTrace:
    """Period loop shared by all three engines.

    ``specs`` lists the phase-1 slots of one period; ``take_sizes(spec)``
    gives ``[(user, n_symbols)]`` in antenna order and ``slot_body(ch, view,
    spec, s)`` returns the per-user results of :func:`pair_slot`.
    """
    _check_relay(scheme, config)
    # without a regeneration slot every slot is self-contained
    unit = params.symbols_per_period // (1 if params.two_phase else params.period_slots)
    exact = check_divisible(str(scheme), {"A+B": dataset.num}, unit, strict)
    trace = SchemeTrace(scheme, signal_level=signal, padded=not exact)
    queue = SymbolQueue(make_symbols(dataset, rng), rng)
    source = ChannelSource(config, build_cluster_plan(config), rng,
                           relay_omni=relay_omni_count(scheme, config),
                           stale_relay=relay_csit is CsitClass.DELAYED)
    N = config.N
    while not queue.empty:
        start = trace.slots_used
        buffers = defaultdict(list)
        for t, spec in enumerate(specs):
            slot = start + t + 1
            groups = [(u, queue.take(n)) for u, n in take_sizes(spec)]
            sent = [sym for _, g in groups for sym in g]
            residual = 0.0
            results = [(None, [None] * len(g)) for _, g in groups]
            if signal:
                s = payloads(sent)[:, None]
                results, residual = source.run(lambda ch, view: slot_body(ch, view, spec, s))
            for (user, g), (est, relay_copy) in zip(groups, results):
                d = min(len(g), N)
                for i, sym in enumerate(g[:d]):
                    trace.decode(sym, slot, slot, None if est is None else est[i])
                for sym, val in zip(g[d:], relay_copy):
                    buffers[user].append((sym, slot, val))
            trace.slots.append(SlotRecord(slot, 1, [x.id for x in sent], residual))
        if params.two_phase:
            slot = start + params.period_slots
            if any(len(v) > N for v in buffers.values()):
                raise RuntimeError("erased symbols exceed the directional capacity")
            if signal:
                erased = {u: np.array([v for _, _, v in items]) for u, items in buffers.items()}
                est = source.run(lambda ch, view: drir_slot(ch, view, erased, N))
            for user, items in buffers.items():
                for i, (sym, tx, _) in enumerate(items):
                    trace.decode(sym, slot, tx, est[user][i] if signal else None)
            trace.slots.append(SlotRecord(slot, 2, [sym.id for items in buffers.values()
                                                    for sym, _, _ in items]))
        trace.slots_used = start + params.period_slots
    trace.resamples = source.resamples
    return finish(trace)


def simulate_haa_pie_rir(config: NetworkConfig, dataset: DataSetSpec, rng: np.random.Generator, *,
                         signal: bool = True, strict: bool = True,
                         relay_csit: CsitClass = CsitClass.MODERATELY_DELAYED) -> SchemeTrace:
    """Two-user partial interference elimination with retrospective regeneration."""
    params = pie_schedule(config)
    M = config.M
    h = ceil_div(M, 2)
    specs = [(0, 1)] * params.phase1_slots
    return _run(Scheme.PIE, config, dataset, rng, params, specs,
                lambda spec: [(0, h), (1, M - h)],
                lambda ch, view, spec, s: pair_slot(ch, view, 0, 1, h, s, config.N),
                signal=signal, strict=strict, relay_csit=relay_csit)


def simulate_haa_ipie_rir(config: NetworkConfig, dataset: DataSetSpec, rng: np.random.Generator, *,
                          signal: bool = True, strict: bool = True,
                          relay_csit: CsitClass = CsitClass.MODERATELY_DELAYED) -> SchemeTrace:
    """K-user variant: joint cancellation of all interference through a stacked inverse."""
    params = ipie_schedule(config)
    plan = build_cluster_plan(config)
    specs = [None] * params.phase1_slots
    return _run(Scheme.IPIE, config, dataset, rng, params, specs,
                lambda spec: list(enumerate(plan.sizes)),
                lambda ch, view, spec, s: stacked_slot(ch, view, plan, s, config.N),
                signal=signal, strict=strict, relay_csit=relay_csit)


def cie_pairing(K: int) -> list[tuple[int, int]]:
    """Slot ``j`` of a group: cluster 1 serves user ``j``, cluster 2 user ``j+1`` (wrapping)."""
    return [(j, (j + 1) % K) for j in range(K)]


def simulate_haa_cie_rir(config: NetworkConfig, dataset: DataSetSpec, rng: np.random.Generator, *,
                         signal: bool = True, strict: bool = True,
                         relay_csit: CsitClass = CsitClass.MODERATELY_DELAYED) -> SchemeTrace:
    """Cyclic two-user service over K users, then one regeneration slot."""
    params = cie_schedule(config)
    K, M = config.K, config.M
    h = ceil_div(M, 2)
    specs = cie_pairing(K) * (params.phase1_slots // K)
    return _run(Scheme.CIE, config, dataset, rng, params, specs,
                lambda spec: [(spec[0], h), (spec[1], M - h)],
                lambda ch, view, spec, s: pair_slot(ch, view, spec[0], spec[1], h, s, config.N),
                signal=signal, strict=strict, relay_csit=relay_csit)
