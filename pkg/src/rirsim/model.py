"""Network topology, antenna clustering, block-fading channels and CSIT classes."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .numerics import COND_LIMIT, ComplexMatrix, pivot_condition, sample_cn01

MAX_RESAMPLES = 100


class ConfigError(ValueError):
    """A configuration violates a model or scheme precondition."""


class ResampleLimitExceeded(RuntimeError):
    """Too many consecutive near-singular channel draws."""


def ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def default_relay_antennas(K: int, M: int, N: int) -> int:
    """Smallest relay array that every scheme in the package can run on.

    Receive side needs ``M``; PIE needs ``N`` omni plus ``2N`` directional,
    IPIE ``KN`` omni plus ``KN`` directional, CIE ``N`` omni plus ``KN``
    directional.
    """
    return max(M, max(ceil_div(M, 2), N) + 2 * N, 2 * K * N, N + K * N)


@dataclass(frozen=True)
class NetworkConfig:
    """``(K, M, N)`` broadcast network with a ``Q``-antenna relay."""

    K: int
    M: int
    N: int
    Q: int | None = None

    def __post_init__(self):
        K, M, N = self.K, self.M, self.N
        if K < 2:
            raise ConfigError(f"need at least 2 users, got K={K}")
        if not M > N >= 1:
            raise ConfigError(f"need M > N >= 1, got M={M}, N={N}")
        if self.Q is None:
            object.__setattr__(self, "Q", default_relay_antennas(K, M, N))
        floor_q = max(M, max(ceil_div(M, 2), N) + 2 * N)
        if self.Q < floor_q:
            raise ConfigError(f"relay has Q={self.Q} antennas, needs at least {floor_q}")

    @property
    def rho(self) -> float:
        return self.M / self.N

    def __str__(self):
        return f"({self.K},{self.M},{self.N})"


@dataclass(frozen=True)
class ClusterPlan:
    sizes: tuple[int, ...]
    offsets: tuple[int, ...]

    def columns(self, i: int) -> slice:
        return slice(self.offsets[i], self.offsets[i] + self.sizes[i])


def cluster_sizes(K: int, M: int) -> tuple[int, ...]:
    # ceil(M/K) per cluster until the antennas run out; the remainder (possibly
    # zero) goes to the trailing clusters.
    step = ceil_div(M, K)
    sizes, left = [], M
    for _ in range(K):
        take = min(step, left)
        sizes.append(take)
        left -= take
    return tuple(sizes)


def build_cluster_plan(config: NetworkConfig) -> ClusterPlan:
    sizes = cluster_sizes(config.K, config.M)
    offsets = tuple(int(x) for x in np.concatenate([[0], np.cumsum(sizes)[:-1]]))
    return ClusterPlan(sizes, offsets)


class CsitClass(enum.Enum):
    INSTANTANEOUS = "instantaneous"
    MODERATELY_DELAYED = "moderately_delayed"
    DELAYED = "delayed"


def classify_csit(t_fb: float, t_c: float, position_in_block: float) -> CsitClass:
    """Classify CSI arriving at ``position_in_block`` of a coherence block.

    ``lambda = t_fb / t_c``. Zero is instantaneous, one or more is delayed.
    In between, CSI that arrives before ``t_c - t_fb`` still leaves the
    transmitter a full feedback interval of unchanged channel and is as good
    as instantaneous; later arrivals are moderately delayed.
    """
    if not t_c > 0:
        raise ValueError("coherence time must be positive")
    if t_fb < 0:
        raise ValueError("feedback delay must be non-negative")
    if not 0 <= position_in_block < t_c:
        raise ValueError("position must lie in [0, t_c)")
    lam = t_fb / t_c
    if lam == 0:
        return CsitClass.INSTANTANEOUS
    if lam >= 1:
        return CsitClass.DELAYED
    if position_in_block > t_c - t_fb:
        return CsitClass.MODERATELY_DELAYED
    return CsitClass.INSTANTANEOUS


@dataclass
class SlotChannels:
    """All channel realisations of one coherence slot.

    ``H_user[i][k]`` is cluster ``i`` to user ``k`` (``N x sizes[i]``),
    ``H_BR`` base station to relay receive array (``M x M``),
    ``H_Romni[k]`` relay omni array to user ``k`` (``N x n_omni``) and
    ``H_Rdir[k]`` the directional beam aimed at user ``k`` (``N x N``).
    A directional beam reaches only its own user, so no cross terms exist.
    Indices are 0-based.
    """

    H_user: list[list[ComplexMatrix]]
    H_BR: ComplexMatrix
    H_Romni: list[ComplexMatrix]
    H_Rdir: list[ComplexMatrix]
    resamples: int = 0

    def base_to_user(self, k: int) -> ComplexMatrix:
        """Full ``N x M`` channel from the whole base-station array to user ``k``."""
        return np.hstack([row[k] for row in self.H_user])

    def omni_stack(self) -> ComplexMatrix:
        return np.vstack(self.H_Romni)

    def inverted_matrices(self) -> list[ComplexMatrix]:
        """Square matrices some scheme inverts directly."""
        mats = [self.H_BR, *self.H_Rdir]
        mats += [h for h in self.H_Romni if h.shape[0] == h.shape[1]]
        stack = self.omni_stack()
        if stack.shape[0] == stack.shape[1]:
            mats.append(stack)
        return mats


def _draw_once(config: NetworkConfig, plan: ClusterPlan, rng: np.random.Generator,
               relay_omni: int) -> SlotChannels:
    K, M, N = config.K, config.M, config.N
    h_user = [[sample_cn01(rng, N, size) if size else np.zeros((N, 0), complex) for _ in range(K)]
              for size in plan.sizes]
    h_br = sample_cn01(rng, M, M)
    omni = [sample_cn01(rng, N, relay_omni) for _ in range(K)]
    direc = [sample_cn01(rng, N, N) for _ in range(K)]
    return SlotChannels(h_user, h_br, omni, direc)


def draw_slot_channels(config: NetworkConfig, plan: ClusterPlan, rng: np.random.Generator,
                       relay_omni: int | None = None) -> SlotChannels:
    """Sample a fresh block-fading realisation for one slot.

    ``relay_omni`` is the number of shared omni relay antennas (default
    ``N``). Realisations where a matrix some scheme must invert has a pivot
    condition estimate above the singularity limit are redrawn; the count is
    stored in ``resamples``.
    """
    relay_omni = config.N if relay_omni is None else relay_omni
    for attempt in range(MAX_RESAMPLES + 1):
        ch = _draw_once(config, plan, rng, relay_omni)
        if all(pivot_condition(m) <= COND_LIMIT for m in ch.inverted_matrices()):
            ch.resamples = attempt
            return ch
    raise ResampleLimitExceeded(
        f"{MAX_RESAMPLES} consecutive near-singular channel draws for {config}")


@dataclass(frozen=True)
class Symbol:
    id: int
    priority: int
    payload: complex


@dataclass(frozen=True)
class DataSetSpec:
    """``A`` high-priority (1) symbols followed by ``B`` low-priority symbols."""

    A: int
    B: int
    low_priority: int = 5

    def __post_init__(self):
        if self.A < 0 or self.B < 0 or self.A + self.B < 1:
            raise ConfigError(f"need A, B >= 0 and A + B >= 1, got A={self.A}, B={self.B}")

    @property
    def num(self) -> int:
        return self.A + self.B


def make_symbols(dataset: DataSetSpec, rng: np.random.Generator) -> list[Symbol]:
    """Queue of symbols in transmission order: every priority-1 symbol first."""
    payload = sample_cn01(rng, dataset.num, 1)[:, 0]
    return [Symbol(i, 1 if i < dataset.A else dataset.low_priority, complex(payload[i]))
            for i in range(dataset.num)]


@dataclass
class SymbolQueue:
    """FIFO over a dataset that pads with dummy symbols once it runs dry.

    Dummies carry ``id = -1`` and random payloads; engines transmit them
    like real symbols but never report a decode event for them.
    """

    symbols: list[Symbol]
    rng: np.random.Generator
    _pos: int = field(default=0, init=False)

    @property
    def empty(self) -> bool:
        return self._pos >= len(self.symbols)

    def take(self, n: int) -> list[Symbol]:
        out = self.symbols[self._pos:self._pos + n]
        self._pos += len(out)
        if len(out) < n:
            pad = sample_cn01(self.rng, n - len(out), 1)[:, 0]
            out = out + [Symbol(-1, 0, complex(z)) for z in pad]
        return out


def ceil_half(M: int) -> int:
    return math.ceil(M / 2)
