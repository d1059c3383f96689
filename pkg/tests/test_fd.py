import math

import numpy as np
import pytest

from cogrelay.channel import sample_network
from cogrelay.dualsolver import oracle_canonical
from cogrelay.fd import (df_power_cap, fd_af_phi, fd_derived, fd_rates, gamma0_fd,
                         map_fd_af_to_canonical, map_fd_df_to_canonical, max_pu_rate_fd,
                         maximize_phi, solve_fd, solve_fd_fixed, solve_fd_scalable)
from cogrelay.hd import map_hd_to_canonical, solve_hd
from cogrelay.numerics import norm_sq


def test_derived_fields(cfg):
    ch = sample_network(cfg, 1)
    d = fd_derived(ch, cfg, 0.01)
    gsq = norm_sq(ch.g_fd)
    assert d.kappa_fd == pytest.approx(5.0 * gsq ** 2 + gsq + 0.01 * ch.g_loop_gain())
    assert d.sigma1_sq == pytest.approx(1 + 0.01 * norm_sq(ch.h_c0_fd) + 5.0 * abs(ch.h0) ** 2)
    assert d.gamma0_fd == 3.0
    assert 0 <= d.pbar_c_fd <= cfg.pc_fd


def test_zero_loop_channel_matches_hd_style_mapping(cfg):
    ch = sample_network(cfg, 2)
    ch = ch.replace(H_loop=np.zeros_like(ch.H_loop), h0=0.0, h0c=0.0)
    c = cfg.replace(pt_mode="fixed", pt_fixed=0.2)
    m = map_fd_af_to_canonical(ch, c, 0.2)
    gsq = norm_sq(ch.g_fd)
    kappa = c.p0_fd * gsq ** 2 + gsq
    g0 = gamma0_fd(c)
    assert m.problem.gamma1 == pytest.approx(kappa * g0 / (c.p0_fd * gsq ** 2 - g0 * gsq))
    np.testing.assert_allclose(m.problem.h1, ch.h_c0_fd / math.sqrt(1 + 0.2 * norm_sq(ch.h_c0_fd)))


def test_af_infeasible_without_backhaul(cfg):
    ch = sample_network(cfg, 3)
    ch = ch.replace(g=ch.g * 1e-4)
    assert not map_fd_af_to_canonical(ch, cfg, 0.0).feasible
    assert not solve_fd(ch, cfg, "AF").feasible


def test_df_fixed_decode_check(cfg):
    c = cfg.replace(pt_mode="fixed", pt_fixed=1.0)
    ch = sample_network(c, 4)
    ch = ch.replace(H_loop=ch.H_loop * 10.0)
    decode = c.p0_fd * norm_sq(ch.g_fd) / (ch.loop_gain() + 1.0)
    assert decode < gamma0_fd(c)
    sol = solve_fd_fixed(ch, c, "DF")
    assert not sol.feasible and sol.r_cu == 0.0


def test_zero_beamformers(cfg):
    ch = sample_network(cfg, 5)
    z = np.zeros(4)
    for proto in ("AF", "DF"):
        assert fd_rates(ch, cfg, proto, z, z, 0.01) == (0.0, 0.0)


def test_df_rates_without_residual_terms(cfg):
    ch = sample_network(cfg, 6)
    ch = ch.replace(H_loop=np.zeros_like(ch.H_loop))
    w0 = np.array([0.3, 1j, -0.5, 0.2])
    wc = np.array([0.1, 0.2, 0.3j, 0.0])
    r_pu, r_cu = fd_rates(ch, cfg, "DF", wc, w0, 0.0)
    fwd = abs(np.vdot(ch.h_c0_fd, w0)) ** 2 / (
        cfg.p0_fd * abs(ch.h0) ** 2 + abs(np.vdot(ch.h_c0_fd, wc)) ** 2 + 1)
    assert r_pu == pytest.approx(math.log2(1 + min(cfg.p0_fd * norm_sq(ch.g_fd), fwd)))
    cu = abs(np.vdot(ch.h_c_fd, wc)) ** 2 / (
        abs(np.vdot(ch.h_c_fd, w0)) ** 2 + cfg.p0_fd * abs(ch.h0c) ** 2 + 1)
    assert r_cu == pytest.approx(math.log2(1 + cu))


@pytest.mark.parametrize("proto", ["AF", "DF"])
@pytest.mark.parametrize("mode", ["fixed", "scalable"])
def test_plug_in_audit(cfg, proto, mode):
    c = cfg.replace(pt_mode=mode, eps2=1e-3)
    for s in range(40):
        ch = sample_network(c, (20, s))
        sol = solve_fd(ch, c, proto)
        if not sol.feasible:
            continue
        r_pu, r_cu = fd_rates(ch, c, proto, sol.w_c, sol.w_relay, sol.pt_effective)
        assert r_pu >= c.r0 - 1e-9
        assert r_cu == pytest.approx(sol.r_cu, rel=1e-7)
        assert sol.power_used <= c.pc_fd * (1 + 1e-9)


@pytest.mark.parametrize("proto", ["AF", "DF"])
def test_fixed_against_oracle(cfg, proto):
    c = cfg.replace(pt_mode="fixed")
    for s in range(6):
        ch = sample_network(c, (21, s))
        m = (map_fd_af_to_canonical if proto == "AF" else map_fd_df_to_canonical)(
            ch, c, c.pt_fixed)
        ref = math.log2(1 + oracle_canonical(m.problem, 24))
        got = solve_fd_fixed(ch, c, proto).r_cu
        assert ref <= got * (1 + 1e-9) and got <= ref * 1.02


def test_phi_zero_budget_and_monotone_without_noise(cfg):
    ch = sample_network(cfg, 7)
    assert fd_af_phi(ch, cfg, 0.0) == 0.0
    c = cfg.replace(eps2=0.0)
    vals = fd_af_phi(ch, c, np.linspace(0, c.pc_fd, 200))
    assert np.all(np.diff(vals) >= -1e-9 * vals.max())


def test_scalable_without_noise_equals_fixed_zero_noise(cfg):
    c = cfg.replace(eps2=0.0)
    for s in range(10):
        ch = sample_network(c, (22, s))
        for proto in ("AF", "DF"):
            a = solve_fd_scalable(ch, c, proto)
            b = solve_fd_fixed(ch, c.replace(pt_mode="fixed", pt_fixed=0.0), proto)
            assert a.r_cu == pytest.approx(b.r_cu, rel=1e-9)
        assert solve_fd_scalable(ch, c, "AF").extra["p_search"] == pytest.approx(c.pc_fd)


def test_psi_sandwich(cfg):
    c = cfg.replace(eps2=2e-2)
    for s in range(10):
        ch = sample_network(c, (23, s))
        p_star, psi = maximize_phi(ch, c)
        ps = np.linspace(0, c.pc_fd, 513)
        assert np.all(fd_af_phi(ch, c, ps) <= psi * (1 + 5e-3))
        assert fd_af_phi(ch, c, p_star) == pytest.approx(psi)
        sol = solve_fd_scalable(ch, c, "AF")
        assert sol.sinr_cu == pytest.approx(psi, rel=1e-7)


def test_df_cap_behaviour(cfg):
    ch = sample_network(cfg, 8)
    caps = [df_power_cap(ch, cfg.replace(eps2=e)) for e in (1e-4, 1e-3, 1e-2, 1e-1, 1.0)]
    assert all(a >= b for a, b in zip(caps, caps[1:]))
    loud = [df_power_cap(ch.replace(H_loop=k * ch.H_loop), cfg) for k in (1, 3, 10, 100)]
    assert all(a >= b for a, b in zip(loud, loud[1:]))
    huge = ch.replace(H_loop=1e4 * ch.H_loop)
    assert df_power_cap(huge, cfg) < 1e-3
    assert not solve_fd_scalable(huge.replace(H_loop=1e6 * ch.H_loop), cfg, "DF").feasible


def test_hd_consistency_with_doubled_powers(cfg):
    c = cfg.replace(pt_mode="fixed", pt_fixed=0.0, fd_power_fraction=1.0,
                    hd_antenna_policy="same_rf")
    cf = c.replace(r0=2 * c.r0)
    for s in range(10):
        ch = sample_network(c, (24, s))
        ch = ch.replace(H_loop=np.zeros_like(ch.H_loop), h0=0.0, h0c=0.0)
        for proto in ("AF", "DF"):
            h = solve_hd(ch, c, proto)
            f = solve_fd(ch, cf, proto)
            assert f.sinr_cu == pytest.approx(h.sinr_cu, rel=1e-9)
            assert f.r_cu == pytest.approx(2 * h.r_cu, rel=1e-9)


def test_max_pu_rate_endpoint(cfg):
    ch = sample_network(cfg.replace(pt_mode="fixed"), 9)
    c = cfg.replace(pt_mode="fixed")
    d = math.sqrt(c.pc_fd) * ch.h_c0_fd / math.sqrt(norm_sq(ch.h_c0_fd))
    assert max_pu_rate_fd(ch, c, "DF") == pytest.approx(
        fd_rates(ch, c, "DF", np.zeros(4), d, c.pt_fixed)[0])
