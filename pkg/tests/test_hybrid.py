import math

import numpy as np
import pytest

from cogrelay.channel import correlation, sample_network
from cogrelay.fd import solve_fd
from cogrelay.hd import solve_hd
from cogrelay.hybrid import (orthogonal_rate, select_mode, tolerable_noise_thresholds,
                             zf_rate_fd_df, zf_rate_hd_df)
from cogrelay.numerics import norm_sq


def test_zf_hd_collinear_is_zero(cfg):
    ch = sample_network(cfg, 1)
    ch = ch.replace(h_c=2j * ch.h_c0)
    assert zf_rate_hd_df(ch, cfg) == 0.0


def test_zf_hd_noise_free_orthogonal(cfg):
    c = cfg.replace(eps2=0.0)
    ch = sample_network(c, 2)
    hc0 = np.zeros(6, complex)
    hc0[0] = 1.0
    hc = np.zeros(6, complex)
    hc[1:] = np.exp(1j * np.arange(5))
    ch = ch.replace(h_c0=hc0, h_c=hc)
    gp = 2 ** (2 * c.r0) - 1 - c.p0 * abs(ch.h0) ** 2
    expect = 0.5 * math.log2(1 + max(0.0, c.pc - gp / norm_sq(hc0)) * norm_sq(hc))
    assert zf_rate_hd_df(ch, c) == pytest.approx(expect, rel=1e-12)


def test_zf_hd_zero_when_backhaul_fails(cfg):
    ch = sample_network(cfg, 3)
    assert zf_rate_hd_df(ch.replace(g=0.01 * ch.g), cfg) == 0.0


def test_zf_fd_collinear_and_clean_limit(cfg):
    ch = sample_network(cfg, 4)
    assert zf_rate_fd_df(ch.replace(h_c=ch.h_c0 * 0.5), cfg) == 0.0
    c = cfg.replace(eps2=0.0)
    clean = ch.replace(H_loop=np.zeros_like(ch.H_loop), h0=0.0, h0c=0.0)
    r2 = correlation(clean.h_c_fd, clean.h_c0_fd)
    g0 = 2 ** c.r0 - 1
    expect = math.log2(1 + max(0.0, c.pc_fd * (1 - r2) - g0 / norm_sq(clean.h_c0_fd))
                       * norm_sq(clean.h_c_fd))
    assert zf_rate_fd_df(clean, c) == pytest.approx(expect, rel=1e-12)


@pytest.mark.parametrize("mode", ["scalable", "fixed"])
def test_zf_never_beats_optimum(cfg, mode):
    c = cfg.replace(pt_mode=mode)
    for s in range(60):
        ch = sample_network(c, (30, s))
        assert zf_rate_hd_df(ch, c) <= solve_hd(ch, c, "DF").r_cu + 1e-9
        assert zf_rate_fd_df(ch, c) <= solve_fd(ch, c, "DF").r_cu + 1e-9


def test_select_mode_rule(cfg):
    for s in range(30):
        ch = sample_network(cfg, (31, s))
        d = select_mode(ch, cfg)
        assert d.chosen == ("FD" if d.r_zf_fd > d.r_zf_hd else "HD")


def test_select_mode_prefers_fd_at_high_power(cfg):
    c = cfg.replace(pc_db=30.0)
    ch = sample_network(c, 5)
    th = tolerable_noise_thresholds(ch, c)
    assert c.eps2 < th.eps2_fd_asymptotic
    assert select_mode(ch, c).chosen == "FD"


def test_ties_go_to_hd(cfg):
    ch = sample_network(cfg, 6)
    ch = ch.replace(h_c=ch.h_c0.copy())
    d = select_mode(ch, cfg)
    assert d.r_zf_hd == d.r_zf_fd == 0.0 and d.chosen == "HD"


def test_threshold_limits():
    from cogrelay.channel import SystemConfig
    c = SystemConfig(r0=1.0, pc_db=300.0)
    ch = sample_network(c, 7)
    hc0 = np.zeros(6, complex)
    hc0[0] = 1.0
    hc = np.zeros(6, complex)
    hc[2] = 1.0
    ch = ch.replace(h_c0=hc0, h_c=hc)
    th = tolerable_noise_thresholds(ch, c)
    assert th.eps2_fd == pytest.approx(1.0)
    assert th.eps2_hd == pytest.approx(1 / 3)
    assert th.eps2_fd_asymptotic is None and th.eps2_hd_asymptotic is None


@pytest.mark.parametrize("seed", range(5))
def test_threshold_is_zero_crossing(cfg, seed):
    c = cfg.replace(hd_antenna_policy="same_rf", r0=1.0, pc_db=25.0)
    ch = sample_network(c, (32, seed)).replace(h0=0.0, h0c=0.0)
    ch = ch.replace(H_loop=np.zeros_like(ch.H_loop))
    th = tolerable_noise_thresholds(ch, c)
    assert th.eps2_hd > 0 and th.eps2_fd > 0
    for eps, fn in ((th.eps2_hd, zf_rate_hd_df), (th.eps2_fd, zf_rate_fd_df)):
        assert fn(ch, c.replace(eps2=eps * (1 - 1e-6))) > 0.0
        assert fn(ch, c.replace(eps2=eps * (1 + 1e-6))) == 0.0


def test_relative_difference_bound(cfg):
    for s in range(50):
        c = cfg.replace(r0=1.0, pc_db=25.0)
        th = tolerable_noise_thresholds(sample_network(c, (33, s)), c)
        if th.eps2_hd > 0 and th.eps2_fd > 0:
            assert th.relative_difference() >= 2 ** c.r0 - 1e-9


def test_orthogonal_trivial(cfg):
    c = cfg.replace(pt_mode="fixed", pt_fixed=0.0)
    ch = sample_network(c, 8)
    hc0 = np.zeros(6, complex)
    hc0[0] = 1.0
    hc = np.zeros(6, complex)
    hc[3] = 0.7
    assert orthogonal_rate(ch.replace(h_c0=hc0, h_c=hc), c) == pytest.approx(
        math.log2(1 + c.pc * 0.49))
    assert orthogonal_rate(ch.replace(h_c0=hc0, h_c=2 * hc0), c) == 0.0


def test_orthogonal_matches_constrained_grid(cfg):
    # dim-2 slice: unit w_c with h_c0^H w_c = 0 is unique up to phase, so
    # the grid runs over all unit vectors and keeps the nearly-orthogonal ones
    c = cfg.replace(n_total=2, n_tx_fd=1, n_rx_fd=1)
    ch = sample_network(c, 9)
    pt = c.eps2 * c.pc
    t = np.linspace(0, np.pi / 2, 801)[:, None]
    f = np.linspace(0, 2 * np.pi, 801)[None, :]
    w = np.stack([np.cos(t) * np.ones_like(f), np.sin(t) * np.exp(1j * f)], axis=-1)
    leak = np.abs(w @ ch.h_c0.conj()) ** 2
    gain = np.abs(w @ ch.h_c.conj()) ** 2
    ok = leak < 1e-4
    best = math.log2(1 + c.pc * gain[ok].max() / (pt * norm_sq(ch.h_c) + 1))
    assert orthogonal_rate(ch, c) == pytest.approx(best, rel=2e-2)
