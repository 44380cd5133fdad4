"""Experiment configuration, parameter sweeps and CSV emission.

An experiment is a grid of ``(N, A, B)`` points crossed with a scheme
list on a fixed ``(K, M)``. Every (scheme, point) pair yields exactly one
:class:`SweepRow`; quantities that could not be produced (scheme
preconditions, no signal-level model) are left as ``None`` and end up as
empty CSV fields. Skipped simulations are collected with their reason so
the caller can write them to a sidecar log.
"""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .metrics import (
    DivisibilityWarning,
    closed_form_dod_exact,
    closed_form_dof_exact,
    complexity,
    event_dod,
)
from .model import ConfigError, DataSetSpec, NetworkConfig, ResampleLimitExceeded
from .numerics import rng_stream
from .schemes import SIGNAL_LEVEL, Scheme, simulate

CSV_FIELDS = ("scheme", "K", "M", "N", "A", "B", "dod_event", "dod_closed", "dof_empirical",
              "dof_closed", "relay_cost", "user_cost", "max_recovery_error", "resamples",
              "slots_used")

MODES = ("simulate", "analytic", "selfcheck", "figure4", "figure5", "figure6", "figure7", "figure8")

SIGNAL_TRIALS = 100
SELFCHECK_TOL = 1e-9

# schemes whose event-driven DoD must equal the closed form exactly
ORACLE_SCHEMES = (Scheme.TDMA, Scheme.BD_TDMA, Scheme.RIA, Scheme.PIE, Scheme.IPIE)

_ALL = ",".join(s.value for s in Scheme)
_BASELINES = "TDMA,BD-TDMA,RIA"

# Per-mode defaults; a config file and --set overrides are layered on top.
PRESETS: dict[str, dict[str, str]] = {
    "simulate": dict(schemes=_ALL, K="2", M="6", N="2", A="600", B="600"),
    "analytic": dict(schemes=_ALL, K="2", M="6", N="2", A="600", B="600"),
    "selfcheck": dict(schemes=_ALL, K="2", M="6", N="2", A="600", B="600", seed="42"),
    "figure4": dict(schemes=_BASELINES, K="2", M="4", N="3", sweep="fraction", num="2400",
                    step="24", signal="false"),
    "figure5": dict(schemes=_BASELINES, K="2", M="4", N="3", sweep="equal", step="24",
                    max="1200", signal="false"),
    "figure6": dict(schemes=_ALL, K="3", M="60", N="10-25", A="1400", B="1400", signal="false"),
    "figure7": dict(schemes=_ALL, K="3", M="60", N="10-25", A="1400", B="1400", signal="false"),
    "figure8": dict(schemes=_ALL, K="3", M="60", N="10-25", A="1400", B="1400"),
}

KNOWN_KEYS = {"mode", "schemes", "K", "M", "N", "Q", "A", "B", "sweep", "num", "step", "max",
              "trials", "seed", "out", "signal", "strict"}


@dataclass(frozen=True)
class ExperimentConfig:
    """A fully resolved experiment.

    ``points`` holds the ``(A, B)`` data-set sizes visited for every ``N``.
    ``trials=None`` means the default: :data:`SIGNAL_TRIALS` for
    signal-level runs, one otherwise (event-level quantities are
    deterministic).
    """

    mode: str = "simulate"
    schemes: tuple[Scheme, ...] = tuple(Scheme)
    K: int = 2
    M: int = 6
    n_values: tuple[int, ...] = (2,)
    points: tuple[tuple[int, int], ...] = ((600, 600),)
    trials: int | None = None
    seed: int = 42
    out: str | None = None
    signal: bool = True
    strict: bool = False
    Q: int | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; choose from {', '.join(MODES)}")
        if not self.schemes:
            raise ConfigError("scheme list is empty")
        if not self.n_values:
            raise ConfigError("N range is empty")
        if not self.points:
            raise ConfigError("no (A, B) points to visit")
        if self.trials is not None and self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        for A, B in self.points:
            if A < 0 or B < 0 or A + B < 1:
                raise ConfigError(f"need A, B >= 0 and A + B >= 1, got A={A}, B={B}")

    @property
    def runs_simulation(self) -> bool:
        return self.mode not in ("analytic", "figure8")

    def trials_for(self, scheme: Scheme) -> int:
        if not (self.signal and scheme in SIGNAL_LEVEL):
            return 1
        return SIGNAL_TRIALS if self.trials is None else self.trials


@dataclass
class SweepRow:
    scheme: Scheme
    K: int
    M: int
    N: int
    A: int
    B: int
    dod_event: float | None = None
    dod_closed: float | None = None
    dof_empirical: float | None = None
    dof_closed: float | None = None
    relay_cost: float | None = None
    user_cost: float | None = None
    max_recovery_error: float | None = None
    resamples: int | None = None
    slots_used: int | None = None
    skip_reason: str | None = field(default=None, compare=False)

    @property
    def point(self) -> str:
        return f"{self.K},{self.M},{self.N},{self.A},{self.B}"


# -- configuration -----------------------------------------------------------

def parse_config_text(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        out[key.strip()] = value.strip()
    return out


def parse_overrides(items) -> dict[str, str]:
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"--set expects key=value, got {item!r}")
        out[key.strip()] = value.strip()
    return out


def _int(key: str, value: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {value!r}") from None


def _int_list(key: str, value: str) -> list[int]:
    """Comma list whose items may be ranges ``lo-hi`` (inclusive)."""
    out = []
    for part in value.split(","):
        part = part.strip()
        lo, dash, hi = part.partition("-")
        if dash and lo:
            a, b = _int(key, lo), _int(key, hi)
            if b < a:
                raise ConfigError(f"{key}: empty range {part!r}")
            out.extend(range(a, b + 1))
        elif part:
            out.append(_int(key, part))
    if not out:
        raise ConfigError(f"{key}: empty list")
    return out


def _bool(key: str, value: str) -> bool:
    v = value.lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected true/false, got {value!r}")


def _points(s: dict[str, str]) -> list[tuple[int, int]]:
    sweep = s.get("sweep", "points")
    if sweep == "points":
        A, B = _int_list("A", s.get("A", "")), _int_list("B", s.get("B", ""))
        if len(A) == 1:
            A = A * len(B)
        if len(B) == 1:
            B = B * len(A)
        if len(A) != len(B):
            raise ConfigError(f"A and B lists differ in length ({len(A)} vs {len(B)})")
        return list(zip(A, B))
    step = _int("step", s.get("step", ""))
    if step < 1:
        raise ConfigError(f"step must be >= 1, got {step}")
    if sweep == "fraction":
        # priority-1 count swept over 0..num, the rest low priority
        num = _int("num", s.get("num", ""))
        return [(a, num - a) for a in range(0, num + 1, step)]
    if sweep == "equal":
        top = _int("max", s.get("max", ""))
        return [(a, a) for a in range(step, top + 1, step)]
    raise ConfigError(f"sweep must be points, fraction or equal, got {sweep!r}")


def build_config(mode: str, settings: dict[str, str] | None = None) -> ExperimentConfig:
    """Resolve ``mode`` defaults overlaid with ``settings`` into a config."""
    settings = dict(settings or {})
    mode = settings.pop("mode", mode)
    if mode not in PRESETS:
        raise ConfigError(f"unknown mode {mode!r}; choose from {', '.join(MODES)}")
    unknown = sorted(set(settings) - KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    s = {**PRESETS[mode], **settings}
    # explicit A/B wins over a preset sweep
    if ("A" in settings or "B" in settings) and "sweep" not in settings:
        s["sweep"] = "points"
    schemes = tuple(dict.fromkeys(Scheme.parse(x) for x in s["schemes"].split(",") if x.strip()))
    signal_default = mode in ("simulate", "selfcheck")
    return ExperimentConfig(
        mode=mode,
        schemes=schemes,
        K=_int("K", s["K"]),
        M=_int("M", s["M"]),
        n_values=tuple(_int_list("N", s["N"])),
        points=tuple(_points(s)),
        trials=_int("trials", s["trials"]) if "trials" in s else None,
        seed=_int("seed", s.get("seed", "42")),
        out=s.get("out"),
        signal=_bool("signal", s["signal"]) if "signal" in s else signal_default,
        strict=_bool("strict", s.get("strict", "false")),
        Q=_int("Q", s["Q"]) if "Q" in s else None,
    )


def load_config(mode: str, path: str | Path | None = None,
                overrides: dict[str, str] | None = None) -> ExperimentConfig:
    settings = {}
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        settings.update(parse_config_text(text))
    settings.update(overrides or {})
    return build_config(mode, settings)


# -- sweep -------------------------------------------------------------------

def _closed_forms(row: SweepRow, scheme: Scheme, net: NetworkConfig):
    with warnings.catch_warnings():
        # padded points are still evaluated literally
        warnings.simplefilter("ignore", DivisibilityWarning)
        row.dod_closed = float(closed_form_dod_exact(scheme, net, row.A, row.B))
    row.dof_closed = float(closed_form_dof_exact(scheme, net))
    cost = complexity(scheme, net)
    row.relay_cost = cost.relay_cost if cost.relay_applicable else None
    row.user_cost = cost.user_cost if cost.user_applicable else None


def _simulate_point(row: SweepRow, scheme: Scheme, net: NetworkConfig, cfg: ExperimentConfig,
                    stream: int):
    dataset = DataSetSpec(row.A, row.B)
    signal = cfg.signal and scheme in SIGNAL_LEVEL
    dods, dofs, errors = [], [], []
    resamples, slots = 0, 0
    for trial in range(cfg.trials_for(scheme)):
        rng = rng_stream(cfg.seed, stream, trial)
        trace = simulate(scheme, net, dataset, rng, signal=signal, strict=cfg.strict)
        dods.append(event_dod(trace.events).exact)
        dofs.append(Fraction(trace.decoded, trace.slots_used))
        if trace.signal_level:
            errors.append(trace.max_recovery_error)
        resamples += trace.resamples
        slots = max(slots, trace.slots_used)
    row.dod_event = float(sum(dods, Fraction(0)) / len(dods))
    row.dof_empirical = float(sum(dofs, Fraction(0)) / len(dofs))
    row.max_recovery_error = max(errors) if errors else None
    row.resamples = resamples
    row.slots_used = slots


def run_experiment(config: ExperimentConfig) -> list[SweepRow]:
    """Evaluate every (N, point, scheme) combination in sweep order.

    Each combination gets its own random stream keyed by
    ``(seed, combination index, trial)``, so rows do not depend on which
    other schemes or points are in the sweep order before them.
    """
    rows = []
    stream = 0
    for N in config.n_values:
        net = NetworkConfig(config.K, config.M, N, config.Q)
        for A, B in config.points:
            for scheme in config.schemes:
                row = SweepRow(scheme, config.K, config.M, N, A, B)
                _closed_forms(row, scheme, net)
                if config.runs_simulation:
                    try:
                        _simulate_point(row, scheme, net, config, stream)
                    except (ConfigError, ResampleLimitExceeded) as exc:
                        row.skip_reason = str(exc)
                rows.append(row)
                stream += 1
    return rows


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str


def selfcheck(rows: list[SweepRow]) -> list[CheckResult]:
    """Oracle agreement and recovery checks over a simulated sweep."""
    out = []
    for r in rows:
        tag = f"{r.scheme} ({r.point})"
        if r.skip_reason is not None:
            out.append(CheckResult(f"{tag} simulated", False, r.skip_reason))
            continue
        if r.scheme in ORACLE_SCHEMES:
            gap = abs(r.dod_event - r.dod_closed)
            out.append(CheckResult(f"{tag} dod_event == dod_closed", gap < SELFCHECK_TOL,
                                   f"|diff| = {gap:.3g}"))
        else:
            out.append(CheckResult(f"{tag} dod_event - dod_closed (informational)", True,
                                   f"{r.dod_event - r.dod_closed:.12g}"))
        if r.max_recovery_error is not None:
            out.append(CheckResult(f"{tag} recovery", r.max_recovery_error < SELFCHECK_TOL,
                                   f"max error {r.max_recovery_error:.3g}"))
    return out


# -- output ------------------------------------------------------------------

def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, Scheme):
        return value.value
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def format_csv(rows: list[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in rows:
        w.writerow([_cell(getattr(r, f)) for f in CSV_FIELDS])
    return buf.getvalue()


def emit_csv(rows: list[SweepRow], path: str | Path) -> None:
    """Write ``rows`` as UTF-8 CSV with the fixed header."""
    path = Path(path)
    try:
        path.write_text(format_csv(rows), encoding="utf-8")
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write CSV: {exc.strerror}", str(path)) from exc


def skip_lines(rows: list[SweepRow]) -> list[str]:
    return [f"{r.scheme} {r.point} SKIPPED: {r.skip_reason}" for r in rows if r.skip_reason]


def skip_log_path(out: str | Path) -> Path:
    return Path(f"{out}.skips.log")


def write_skip_log(rows: list[SweepRow], path: str | Path) -> None:
    lines = skip_lines(rows)
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


__all__ = [
    "CSV_FIELDS", "MODES", "PRESETS", "ExperimentConfig", "SweepRow", "CheckResult",
    "parse_config_text", "parse_overrides", "build_config", "load_config", "run_experiment",
    "selfcheck", "format_csv", "emit_csv", "skip_lines", "skip_log_path", "write_skip_log",
]
