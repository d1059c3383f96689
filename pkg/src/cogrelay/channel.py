"""Scenario configuration, channel realizations and antenna partitioning."""
from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .numerics import as_cvec, norm_sq

PT_MODES = ("fixed", "scalable")
HD_POLICIES = ("full", "same_rf")
DIRECT_PRELOGS = ("full", "half")


class ConfigError(ValueError):
    """Invalid configuration value; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def db2lin(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


@dataclass(frozen=True)
class SystemConfig:
    """All scalar parameters of one scenario.

    Powers are transmit SNRs in dB (receiver noise is normalized to one).
    The full-duplex mode runs on ``fd_power_fraction`` of both the PBS and
    the CBS power so that the two modes spend the same energy.
    """

    n_total: int = 6
    n_tx_fd: int = 4
    n_rx_fd: int = 2
    p0_db: float = 10.0
    pc_db: float = 20.0
    r0: float = 2.0
    eps2: float = 1e-4
    pt_mode: str = "scalable"
    pt_fixed: float = 1e-2
    pathloss_exp: float = 3.5
    d_pbs_pu: float = 2.0
    d_pbs_cu: float = 2.0
    d_cbs_pbs: float = 1.0
    d_cbs_pu: float = 1.0
    d_cbs_cu: float = 1.0
    hd_antenna_policy: str = "full"
    fd_power_fraction: float = 0.5
    direct_prelog: str = "full"

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        for name in ("n_total", "n_tx_fd", "n_rx_fd"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                raise ConfigError(name, f"must be an integer, got {v!r}")
        if self.n_tx_fd < 1:
            raise ConfigError("n_tx_fd", "must be >= 1")
        if self.n_rx_fd < 1:
            raise ConfigError("n_rx_fd", "must be >= 1")
        if self.n_tx_fd + self.n_rx_fd != self.n_total:
            raise ConfigError(
                "n_total",
                f"n_tx_fd + n_rx_fd = {self.n_tx_fd + self.n_rx_fd} != {self.n_total}",
            )
        for name in ("p0_db", "pc_db", "r0", "eps2", "pt_fixed", "pathloss_exp",
                     "fd_power_fraction"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ConfigError(name, f"must be a finite number, got {v!r}")
        if self.r0 < 0:
            raise ConfigError("r0", "must be >= 0")
        if self.eps2 < 0:
            raise ConfigError("eps2", "must be >= 0")
        if self.pt_fixed < 0:
            raise ConfigError("pt_fixed", "must be >= 0")
        if not 0 < self.fd_power_fraction:
            raise ConfigError("fd_power_fraction", "must be > 0")
        for name in ("d_pbs_pu", "d_pbs_cu", "d_cbs_pbs", "d_cbs_pu", "d_cbs_cu"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not v > 0:
                raise ConfigError(name, f"distance must be > 0, got {v!r}")
        if self.pt_mode not in PT_MODES:
            raise ConfigError("pt_mode", f"must be one of {PT_MODES}, got {self.pt_mode!r}")
        if self.hd_antenna_policy not in HD_POLICIES:
            raise ConfigError(
                "hd_antenna_policy",
                f"must be one of {HD_POLICIES}, got {self.hd_antenna_policy!r}",
            )
        if self.direct_prelog not in DIRECT_PRELOGS:
            raise ConfigError(
                "direct_prelog", f"must be one of {DIRECT_PRELOGS}, got {self.direct_prelog!r}"
            )

    # derived linear powers
    @property
    def p0(self) -> float:
        return db2lin(self.p0_db)

    @property
    def pc(self) -> float:
        return db2lin(self.pc_db)

    @property
    def p0_fd(self) -> float:
        return self.fd_power_fraction * self.p0

    @property
    def pc_fd(self) -> float:
        return self.fd_power_fraction * self.pc

    def replace(self, **changes) -> "SystemConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "SystemConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            name = sorted(unknown)[0]
            raise ConfigError(name, "unknown configuration key")
        return cls(**d)


@dataclass
class ChannelSet:
    """One realization of every channel in the network.

    The full-duplex views are slices of the half-duplex vectors: the first
    ``n_rx`` entries of ``g`` and the first ``n_tx`` entries of ``h_c0`` and
    ``h_c``.  ``H_loop`` is the ``n_rx x n_tx`` residual loop channel.
    """

    h0: complex
    h0c: complex
    g: np.ndarray
    h_c0: np.ndarray
    h_c: np.ndarray
    H_loop: np.ndarray
    n_tx: int = field(default=0)
    n_rx: int = field(default=0)

    def __post_init__(self):
        self.h0 = complex(self.h0)
        self.h0c = complex(self.h0c)
        self.g = as_cvec(self.g)
        self.h_c0 = as_cvec(self.h_c0)
        self.h_c = as_cvec(self.h_c)
        self.H_loop = np.atleast_2d(np.asarray(self.H_loop, dtype=np.complex128))
        if not self.n_rx:
            self.n_rx = self.H_loop.shape[0]
        if not self.n_tx:
            self.n_tx = self.H_loop.shape[1]
        n = self.g.shape[0]
        if self.h_c0.shape[0] != n or self.h_c.shape[0] != n:
            raise ValueError("g, h_c0 and h_c must have equal length")
        if self.H_loop.shape != (self.n_rx, self.n_tx):
            raise ValueError(
                f"H_loop shape {self.H_loop.shape} does not match ({self.n_rx}, {self.n_tx})"
            )
        if self.n_rx > n or self.n_tx > n:
            raise ValueError("FD antenna counts exceed the HD vector length")

    @property
    def n_total(self) -> int:
        return self.g.shape[0]

    @property
    def g_fd(self) -> np.ndarray:
        return self.g[: self.n_rx]

    @property
    def h_c0_fd(self) -> np.ndarray:
        return self.h_c0[: self.n_tx]

    @property
    def h_c_fd(self) -> np.ndarray:
        return self.h_c[: self.n_tx]

    def hd_view(self, policy: str = "full") -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return ``(g, h_c0, h_c)`` as seen by the HD CBS under ``policy``.

        ``same_rf`` receives on the FD receive antennas and transmits on the FD
        transmit antennas; ``full`` uses every antenna in both phases.
        """
        if policy == "full":
            return self.g, self.h_c0, self.h_c
        if policy == "same_rf":
            return self.g_fd, self.h_c0_fd, self.h_c_fd
        raise ValueError(f"unknown HD antenna policy {policy!r}")

    def loop_gain(self) -> float:
        """``||H||_F^2``."""
        return float(np.sum(np.abs(self.H_loop) ** 2))

    def g_loop_gain(self) -> float:
        """``||g_FD^H H||^2``."""
        row = self.g_fd.conj() @ self.H_loop
        return norm_sq(row)

    def replace(self, **changes) -> "ChannelSet":
        return dataclasses.replace(self, **changes)

    # JSON: every complex number is a [re, im] pair
    def to_json(self) -> str:
        def vec(v):
            return [[float(z.real), float(z.imag)] for z in np.ravel(v)]

        doc = {
            "h0": [self.h0.real, self.h0.imag],
            "h0c": [self.h0c.real, self.h0c.imag],
            "g": vec(self.g),
            "h_c0": vec(self.h_c0),
            "h_c": vec(self.h_c),
            "H_loop": [vec(row) for row in self.H_loop],
            "n_tx": self.n_tx,
            "n_rx": self.n_rx,
        }
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ChannelSet":
        doc = json.loads(text)

        def cplx(pair):
            re, im = pair
            return complex(re, im)

        def vec(items):
            return np.array([cplx(p) for p in items], dtype=np.complex128)

        return cls(
            h0=cplx(doc["h0"]),
            h0c=cplx(doc["h0c"]),
            g=vec(doc["g"]),
            h_c0=vec(doc["h_c0"]),
            h_c=vec(doc["h_c"]),
            H_loop=np.array([vec(r) for r in doc["H_loop"]], dtype=np.complex128),
            n_tx=int(doc["n_tx"]),
            n_rx=int(doc["n_rx"]),
        )


def pathloss_amplitude(d: float, c: float) -> float:
    return d ** (-c / 2.0)


def make_rng(seed) -> np.random.Generator:
    """PCG64 generator; ``seed`` may be an int or a sequence such as ``(base, trial)``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def sample_network(cfg: SystemConfig, seed) -> ChannelSet:
    """Draw one channel realization.

    Geometry channels have deterministic magnitude ``d^(-c/2)`` and a uniform
    phase per antenna pair; the loop channel is i.i.d. CN(0, 1).
    """
    rng = make_rng(seed)
    n = cfg.n_total
    c = cfg.pathloss_exp

    def phases(size):
        return np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, size=size))

    h0 = pathloss_amplitude(cfg.d_pbs_pu, c) * phases(1)[0]
    h0c = pathloss_amplitude(cfg.d_pbs_cu, c) * phases(1)[0]
    g = pathloss_amplitude(cfg.d_cbs_pbs, c) * phases(n)
    h_c0 = pathloss_amplitude(cfg.d_cbs_pu, c) * phases(n)
    h_c = pathloss_amplitude(cfg.d_cbs_cu, c) * phases(n)
    shape = (cfg.n_rx_fd, cfg.n_tx_fd)
    H = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)
    return ChannelSet(h0=h0, h0c=h0c, g=g, h_c0=h_c0, h_c=h_c, H_loop=H,
                      n_tx=cfg.n_tx_fd, n_rx=cfg.n_rx_fd)


def correlation(a, b) -> float:
    """Normalized squared inner product ``|a^H b|^2 / (||a||^2 ||b||^2)`` in [0, 1]."""
    a = as_cvec(a)
    b = as_cvec(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na, nb = norm_sq(a), norm_sq(b)
    if na == 0.0 or nb == 0.0:
        raise ValueError("correlation of a zero vector is undefined")
    r = abs(np.vdot(a, b)) ** 2 / (na * nb)
    return min(1.0, max(0.0, float(r)))
