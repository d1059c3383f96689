"""Optimal beamforming for a half- or full-duplex cognitive relay base station."""
from .channel import ChannelSet, ConfigError, SystemConfig, correlation, sample_network
from .dualsolver import (CanonicalInfeasible, CanonicalProblem, DualSolution, oracle_canonical,
                         recover_beamformers, solve_canonical)
from .fd import fd_af_phi, fd_rates, solve_fd, solve_fd_fixed, solve_fd_scalable
from .hd import LinkSolution, hd_rates, map_hd_to_canonical, solve_hd
from .hybrid import (ModeDecision, orthogonal_rate, select_mode, tolerable_noise_thresholds,
                     zf_rate_fd_df, zf_rate_hd_df)
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "CanonicalInfeasible", "CanonicalProblem", "ChannelSet", "ConfigError",
    "DualSolution", "LinkSolution", "ModeDecision", "SystemConfig", "correlation",
    "fd_af_phi", "fd_rates", "hd_rates", "map_hd_to_canonical", "oracle_canonical",
    "orthogonal_rate", "recover_beamformers", "sample_network", "select_mode",
    "solve_canonical", "solve_fd", "solve_fd_fixed", "solve_fd_scalable", "solve_hd",
    "tolerable_noise_thresholds", "zf_rate_fd_df", "zf_rate_hd_df",
]
