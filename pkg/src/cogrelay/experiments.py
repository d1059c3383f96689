"""Monte Carlo harness: rate sweeps, PU outage, rate regions and table output.

Every trial draws one channel realization from the seed ``(base_seed,
trial)`` and evaluates all requested schemes on it, so schemes are compared
on common random numbers.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .channel import ChannelSet, ConfigError, SystemConfig, sample_network
from .fd import max_pu_rate_fd, solve_fd
from .hd import LinkSolution, max_pu_rate_hd, solve_hd
from .hybrid import orthogonal_rate, select_mode

SCHEMES = (
    "HD-AF", "HD-DF", "HD-AF-sameRF", "HD-DF-sameRF", "FD-AF", "FD-DF",
    "HYBRID-AF", "HYBRID-DF", "BEST-AF", "BEST-DF", "ORTHOGONAL", "DIRECT",
)
REGION_SCHEMES = SCHEMES[:6]
VARIABLES = ("pc_db", "eps2", "r0", "antenna_split")
METRICS = ("mean_cu_rate", "pu_outage", "rate_region")
CSV_HEADER = ("variable", "value", "scheme", "metric", "mean", "stderr", "n_trials", "seed")

DEFAULT_RATE_TRIALS = 1000
DEFAULT_OUTAGE_TRIALS = 10000

Transform = Callable[[ChannelSet], ChannelSet]


def check_schemes(schemes: Sequence[str]) -> None:
    for s in schemes:
        if s not in SCHEMES:
            raise ConfigError("schemes", f"unknown scheme {s!r}; expected one of {SCHEMES}")


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    values: tuple
    schemes: tuple
    n_trials: int = DEFAULT_RATE_TRIALS
    seed: int = 0
    metric: str = "mean_cu_rate"

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        object.__setattr__(self, "schemes", tuple(self.schemes))
        if self.variable not in VARIABLES:
            raise ConfigError("variable", f"must be one of {VARIABLES}, got {self.variable!r}")
        if not self.values:
            raise ConfigError("values", "must be nonempty")
        if not self.schemes:
            raise ConfigError("schemes", "must be nonempty")
        check_schemes(self.schemes)
        if isinstance(self.n_trials, bool) or not isinstance(self.n_trials, int) \
                or self.n_trials < 1:
            raise ConfigError("n_trials", f"must be an integer >= 1, got {self.n_trials!r}")
        if self.metric not in ("mean_cu_rate", "pu_outage"):
            raise ConfigError("metric", f"sweeps support mean_cu_rate or pu_outage, "
                                        f"got {self.metric!r}")

    def to_dict(self) -> dict:
        return {"variable": self.variable, "values": list(self.values),
                "schemes": list(self.schemes), "n_trials": self.n_trials,
                "seed": self.seed, "metric": self.metric}


@dataclass(frozen=True)
class ResultRow:
    variable: str
    value: float
    scheme: str
    metric: str
    mean: float
    stderr: float
    n_trials: int
    seed: int


@dataclass
class ResultTable:
    rows: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    spec: dict = field(default_factory=dict)

    def get(self, value, scheme) -> ResultRow:
        for r in self.rows:
            if r.value == value and r.scheme == scheme:
                return r
        raise KeyError((value, scheme))

    def series(self, scheme) -> list:
        return [r.mean for r in self.rows if r.scheme == scheme]


def apply_variable(cfg: SystemConfig, variable: str, value) -> SystemConfig:
    if variable == "antenna_split":
        n_tx = int(value)
        return cfg.replace(n_tx_fd=n_tx, n_rx_fd=cfg.n_total - n_tx)
    return cfg.replace(**{variable: float(value)})


def direct_rate(ch: ChannelSet, cfg: SystemConfig) -> float:
    prelog = 1.0 if cfg.direct_prelog == "full" else 0.5
    return prelog * math.log2(1.0 + cfg.p0 * abs(ch.h0) ** 2)


def _better(a: LinkSolution, b: LinkSolution) -> LinkSolution:
    if a.feasible != b.feasible:
        return a if a.feasible else b
    return b if b.r_cu > a.r_cu else a


def solve_scheme(ch: ChannelSet, cfg: SystemConfig, scheme: str) -> tuple[float, bool]:
    """``(CU rate, PU outage)`` of one scheme on one realization."""
    if scheme == "DIRECT":
        return 0.0, direct_rate(ch, cfg) < cfg.r0
    if scheme == "ORTHOGONAL":
        return orthogonal_rate(ch, cfg), direct_rate(ch, cfg) < cfg.r0
    sol = solve_link(ch, cfg, scheme)
    return sol.r_cu, not sol.feasible


def solve_link(ch: ChannelSet, cfg: SystemConfig, scheme: str) -> LinkSolution:
    """Optimal link solution for a relaying scheme."""
    check_schemes([scheme])
    kind, _, rest = scheme.partition("-")
    protocol = rest[:2]
    if kind == "HD":
        policy = "same_rf" if scheme.endswith("sameRF") else "full"
        return solve_hd(ch, cfg, protocol, policy)
    if kind == "FD":
        return solve_fd(ch, cfg, protocol)
    if kind == "HYBRID":
        if select_mode(ch, cfg).chosen == "FD":
            return solve_fd(ch, cfg, protocol)
        return solve_hd(ch, cfg, protocol)
    if kind == "BEST":
        return _better(solve_hd(ch, cfg, protocol), solve_fd(ch, cfg, protocol))
    raise ValueError(f"scheme {scheme!r} has no link solution")


def _run_chunk(args):
    cfg, schemes, seed, trials, transform = args
    out = np.empty((len(trials), len(schemes), 2))
    for i, t in enumerate(trials):
        ch = sample_network(cfg, (seed, t))
        if transform is not None:
            ch = transform(ch)
        for j, s in enumerate(schemes):
            r, outage = solve_scheme(ch, cfg, s)
            out[i, j] = (r, float(outage))
    return out


def _chunks(n: int, k: int) -> list:
    size = max(1, math.ceil(n / k))
    return [range(a, min(n, a + size)) for a in range(0, n, size)]


def default_workers() -> int:
    return max(1, min(os.cpu_count() or 1, 8))


def simulate(cfg: SystemConfig, schemes: Sequence[str], n_trials: int, seed: int,
             transform: Transform | None = None, workers: int | None = None) -> np.ndarray:
    """Per-trial ``(cu_rate, outage)`` for each scheme, shape ``(n_trials, S, 2)``.

    The result does not depend on ``workers``.
    """
    check_schemes(schemes)
    schemes = tuple(schemes)
    workers = default_workers() if workers is None else max(1, int(workers))
    if workers == 1 or n_trials < 2 * workers:
        return _run_chunk((cfg, schemes, seed, range(n_trials), transform))
    tasks = [(cfg, schemes, seed, r, transform) for r in _chunks(n_trials, 4 * workers)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_run_chunk, tasks))
    return np.concatenate(parts, axis=0)


def _mean_stderr(x: np.ndarray) -> tuple[float, float]:
    n = x.shape[0]
    mean = float(np.mean(x))
    if n < 2:
        return mean, 0.0
    return mean, float(np.std(x, ddof=1) / math.sqrt(n))


def run_sweep(cfg: SystemConfig, spec: SweepSpec, transform: Transform | None = None,
              workers: int | None = None) -> ResultTable:
    """Average CU rate or outage fraction per (value, scheme)."""
    col = 0 if spec.metric == "mean_cu_rate" else 1
    rows = []
    for value in spec.values:
        vcfg = apply_variable(cfg, spec.variable, value)
        data = simulate(vcfg, spec.schemes, spec.n_trials, spec.seed, transform, workers)
        for j, scheme in enumerate(spec.schemes):
            mean, se = _mean_stderr(data[:, j, col])
            rows.append(ResultRow(spec.variable, float(value), scheme, spec.metric,
                                  mean, se, spec.n_trials, spec.seed))
    return ResultTable(rows=rows, config=cfg.to_dict(), spec=spec.to_dict())


def pu_outage(cfg: SystemConfig, scheme: str, n_trials: int = DEFAULT_OUTAGE_TRIALS,
              seed: int = 0, transform: Transform | None = None,
              workers: int | None = None) -> float:
    """Fraction of realizations on which ``scheme`` cannot deliver ``r0`` to the PU."""
    data = simulate(cfg, [scheme], n_trials, seed, transform, workers)
    return float(np.mean(data[:, 0, 1]))


def max_pu_rate(ch: ChannelSet, cfg: SystemConfig, scheme: str) -> float:
    if scheme not in REGION_SCHEMES:
        raise ValueError(f"rate regions are traced for {REGION_SCHEMES}, got {scheme!r}")
    kind, _, rest = scheme.partition("-")
    protocol = rest[:2]
    if kind == "FD":
        return max_pu_rate_fd(ch, cfg, protocol)
    policy = "same_rf" if scheme.endswith("sameRF") else "full"
    return max_pu_rate_hd(ch, cfg, protocol, policy)


def pareto_filter(points) -> list:
    """Non-dominated ``(r_pu, r_cu)`` pairs sorted by increasing ``r_pu``."""
    pts = sorted(points, key=lambda p: (-p[0], -p[1]))
    front = []
    best_cu = -math.inf
    for pu, cu in pts:
        if cu > best_cu:
            front.append((pu, cu))
            best_cu = cu
    return front[::-1]


def trace_rate_region(ch: ChannelSet, cfg: SystemConfig, scheme: str,
                      n_points: int = 41) -> list:
    """Pareto boundary of the (PU rate, CU rate) region on one realization.

    The PU target sweeps from 0 to the largest PU rate the scheme supports;
    infeasible targets are dropped and the all-relay endpoint is appended.
    """
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    r_max = max_pu_rate(ch, cfg, scheme)
    pts = [(r_max, 0.0)]
    for r0 in np.linspace(0.0, r_max, n_points):
        sol = solve_link(ch, cfg.replace(r0=float(r0)), scheme)
        if sol.feasible:
            pts.append((sol.r_pu, sol.r_cu))
    return pareto_filter(pts)


def region_table(ch: ChannelSet, cfg: SystemConfig, schemes: Sequence[str],
                 n_points: int, seed: int) -> ResultTable:
    """Regions as table rows: ``value`` is the PU rate and ``mean`` the CU rate."""
    rows = []
    for scheme in schemes:
        for pu, cu in trace_rate_region(ch, cfg, scheme, n_points):
            rows.append(ResultRow("r_pu", pu, scheme, "rate_region", cu, 0.0, 1, seed))
    spec = {"metric": "rate_region", "schemes": list(schemes), "n_points": n_points,
            "seed": seed}
    return ResultTable(rows=rows, config=cfg.to_dict(), spec=spec)


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return f"{float(x):.10g}"


def table_to_csv(t: ResultTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in t.rows:
        w.writerow([_fmt(getattr(r, k)) for k in CSV_HEADER])
    return buf.getvalue()


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_suffix(path.suffix + ".json") if path.suffix != ".json" \
        else path.with_name(path.name + ".meta.json")


def emit_table(t: ResultTable, path) -> None:
    """Write ``path`` as CSV and ``<path>.json`` with the configuration."""
    path = Path(path)
    meta = {"config": t.config, "spec": t.spec}
    try:
        path.write_text(table_to_csv(t))
        sidecar_path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc


def read_table(path) -> ResultTable:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        rows = [ResultRow(d["variable"], float(d["value"]), d["scheme"], d["metric"],
                          float(d["mean"]), float(d["stderr"]), int(d["n_trials"]),
                          int(d["seed"])) for d in reader]
    meta_file = sidecar_path(path)
    meta = json.loads(meta_file.read_text()) if meta_file.exists() else {}
    return ResultTable(rows=rows, config=meta.get("config", {}), spec=meta.get("spec", {}))
