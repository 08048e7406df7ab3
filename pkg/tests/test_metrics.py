"""Tests for link metrics, the power model, and beamformer validation."""

import numpy as np
import pytest

from nfbf.channel import PathComponent, Scenario, make_user_channel
from nfbf.geometry import ArrayConfig, PolarCoord, nearfield_steering
from nfbf.metrics import (
    ANALOG_ONLY,
    HYBRID_COMPOSITE,
    BeamformerMatrix,
    PowerModel,
    achievable_rate,
    beam_gain,
    beam_pattern_grid,
    energy_efficiency,
    noise_from_snr,
    sinr,
    slnr,
    sum_rate,
    total_power,
)


def _scenario(cfg, locations, gains=None):
    if gains is None:
        gains = [1.0 + 0.0j] * len(locations)
    users = [
        make_user_channel(cfg, [PathComponent(g, loc)])
        for g, loc in zip(gains, locations)
    ]
    return Scenario(users=users, array=cfg, seed=None)


def _random_scenario_and_f(rng, n, k):
    cfg = ArrayConfig(n_bs=n)
    locs = [
        PolarCoord(rng.uniform(-np.pi / 2, np.pi / 2), rng.uniform(3.0, 100.0))
        for _ in range(k)
    ]
    gains = [complex(rng.standard_normal(), rng.standard_normal()) for _ in range(k)]
    sc = _scenario(cfg, locs, gains)
    f = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
    f /= np.linalg.norm(f, axis=0, keepdims=True)
    return cfg, sc, f


def test_noise_from_snr_oracle():
    assert noise_from_snr(1.0, 4, 20.0) == 0.0025
    assert noise_from_snr(1.0, 2, -5.0) == 1.5811388300841895
    # doubling the transmit power at a fixed SNR doubles the noise floor
    assert noise_from_snr(2.0, 4, 20.0) == pytest.approx(0.005, abs=0)


def test_sinr_single_user_reduces_to_snr():
    cfg = ArrayConfig(n_bs=8)
    loc = PolarCoord(0.3, 40.0)
    sc = _scenario(cfg, [loc])
    f = nearfield_steering(cfg, loc)[:, None]
    # matched filter: |h^H f|^2 = N * 1 (gain 1, prefactor sqrt(N))
    got = sinr(sc, f, 0, 1.0, 0.01)
    assert got == pytest.approx(8.0 / 0.01, rel=1e-12)
    assert achievable_rate(got) == pytest.approx(np.log2(1.0 + 800.0), rel=1e-12)


def test_sinr_manual_two_user_oracle():
    # hand-buildable 2x2 case: h_0 = e_0*2, h_1 = e_1, f = I columns
    cfg = ArrayConfig(n_bs=2)
    sc = _scenario(cfg, [PolarCoord(0.0, 50.0), PolarCoord(0.5, 60.0)])
    h0 = np.array([2.0, 0.0], dtype=complex)
    h1 = np.array([0.0, 1.0], dtype=complex)
    sc.users[0].vector = h0
    sc.users[1].vector = h1
    f = np.eye(2, dtype=complex)
    p, s2 = 1.0, 0.1
    # user 0: (0.5*4) / (0.5*0 + 0.1) = 20
    assert sinr(sc, f, 0, p, s2) == pytest.approx(20.0, rel=1e-12)
    assert sinr(sc, f, 1, p, s2) == pytest.approx(5.0, rel=1e-12)
    want = np.log2(21.0) + np.log2(6.0)
    assert sum_rate(sc, f, p, s2) == pytest.approx(want, rel=1e-12)


def test_sinr_interference_lowers_rate():
    rng = np.random.default_rng(3)
    for _ in range(20):
        cfg, sc, f = _random_scenario_and_f(rng, 16, 3)
        s2 = 0.05
        for k in range(3):
            full = sinr(sc, f, k, 1.0, s2)
            # same per-user power P/K = 1/3 with the interferers removed
            sc_k = Scenario(users=[sc.users[k]], array=cfg, seed=None)
            alone = sinr(sc_k, f[:, [k]], 0, 1.0 / 3.0, s2)
            assert full <= alone + 1e-12


def test_slnr_matches_brute_force():
    rng = np.random.default_rng(7)
    for _ in range(20):
        cfg, sc, f = _random_scenario_and_f(rng, 12, 4)
        p, s2 = 2.0, 0.3
        for k in range(4):
            num = (p / 4) * np.abs(sc.users[k].vector.conj() @ f[:, k]) ** 2
            den = s2
            for i in range(4):
                if i != k:
                    den += (p / 4) * np.abs(sc.users[i].vector.conj() @ f[:, k]) ** 2
            assert slnr(sc, f, k, p, s2) == pytest.approx(num / den, rel=1e-12)


def test_global_phase_invariance():
    rng = np.random.default_rng(11)
    cfg, sc, f = _random_scenario_and_f(rng, 16, 3)
    rot = f * np.exp(1j * 1.234)
    for k in range(3):
        assert sinr(sc, rot, k, 1.0, 0.1) == pytest.approx(
            sinr(sc, f, k, 1.0, 0.1), rel=1e-12
        )
        assert slnr(sc, rot, k, 1.0, 0.1) == pytest.approx(
            slnr(sc, f, k, 1.0, 0.1), rel=1e-12
        )
    assert sum_rate(sc, rot, 1.0, 0.1) == pytest.approx(
        sum_rate(sc, f, 1.0, 0.1), rel=1e-12
    )


def test_sum_rate_user_permutation_invariance():
    rng = np.random.default_rng(13)
    cfg, sc, f = _random_scenario_and_f(rng, 16, 4)
    perm = [2, 0, 3, 1]
    sc_p = Scenario(users=[sc.users[i] for i in perm], array=cfg, seed=None)
    f_p = f[:, perm]
    assert sum_rate(sc_p, f_p, 1.0, 0.2) == pytest.approx(
        sum_rate(sc, f, 1.0, 0.2), rel=1e-12
    )


def test_beam_gain_cauchy_schwarz_bound():
    rng = np.random.default_rng(17)
    cfg = ArrayConfig(n_bs=32)
    for _ in range(50):
        loc = PolarCoord(rng.uniform(-np.pi / 2, np.pi / 2), rng.uniform(3.0, 500.0))
        f = rng.standard_normal(32) + 1j * rng.standard_normal(32)
        f /= np.linalg.norm(f)
        assert beam_gain(cfg, f, loc) <= 1.0 + 1e-12
    # matched filter achieves the bound
    loc = PolarCoord(-0.4, 25.0)
    assert beam_gain(cfg, nearfield_steering(cfg, loc), loc) == pytest.approx(
        1.0, rel=1e-12
    )


def test_beam_pattern_grid_matches_pointwise():
    rng = np.random.default_rng(19)
    cfg = ArrayConfig(n_bs=16)
    f = rng.standard_normal(16) + 1j * rng.standard_normal(16)
    f /= np.linalg.norm(f)
    angles = np.deg2rad([-60.0, -10.0, 0.0, 35.0])
    radii = np.array([5.0, 50.0, 200.0])
    grid = beam_pattern_grid(cfg, f, angles, radii)
    assert grid.shape == (4, 3)
    for i, a in enumerate(angles):
        for j, r in enumerate(radii):
            want = beam_gain(cfg, f, PolarCoord(float(a), float(r)))
            assert grid[i, j] == pytest.approx(want, rel=1e-12)
    with pytest.raises(ValueError):
        beam_pattern_grid(cfg, f, np.array([]), radii)


def test_total_power_oracle():
    m = PowerModel()
    assert total_power(m, 64, 4) == 3.8640000000000003
    assert total_power(PowerModel(includes_baseband=False), 64, 4) == 3.664
    assert total_power(PowerModel(includes_baseband=False), 64, 1) == 1.666


def test_energy_efficiency_favors_analog_front_end():
    # at equal sum rate, the single-chain no-baseband front end wins
    rate = 10.0
    p_analog = total_power(PowerModel(includes_baseband=False), 64, 1)
    p_hybrid = total_power(PowerModel(), 64, 4)
    assert energy_efficiency(rate, p_analog) > energy_efficiency(rate, p_hybrid)
    assert energy_efficiency(rate, p_hybrid) == pytest.approx(
        rate / 3.8640000000000003, rel=1e-15
    )
    with pytest.raises(ValueError):
        energy_efficiency(rate, 0.0)


def test_power_model_rejects_negative_component():
    with pytest.raises(ValueError):
        PowerModel(p_ps=-0.01)


def test_beamformer_matrix_validation():
    n = 16
    good = np.exp(1j * np.linspace(0.0, 3.0, n * 2).reshape(n, 2)) / np.sqrt(n)
    BeamformerMatrix(good, ANALOG_ONLY).validate()
    bad = good.copy()
    bad[0, 0] *= 1.5
    with pytest.raises(ValueError):
        BeamformerMatrix(bad, ANALOG_ONLY).validate()

    rng = np.random.default_rng(23)
    m = rng.standard_normal((n, 3)) + 1j * rng.standard_normal((n, 3))
    m /= np.linalg.norm(m, axis=0, keepdims=True)
    BeamformerMatrix(m, HYBRID_COMPOSITE).validate()
    with pytest.raises(ValueError):
        BeamformerMatrix(2.0 * m, HYBRID_COMPOSITE).validate()
    with pytest.raises(ValueError):
        BeamformerMatrix(m, "something-else").validate()


def test_metrics_accept_wrapped_or_raw_matrix():
    rng = np.random.default_rng(29)
    cfg, sc, f = _random_scenario_and_f(rng, 8, 2)
    wrapped = BeamformerMatrix(f, HYBRID_COMPOSITE)
    assert sum_rate(sc, wrapped, 1.0, 0.1) == sum_rate(sc, f, 1.0, 0.1)
    assert sinr(sc, wrapped, 1, 1.0, 0.1) == sinr(sc, f, 1, 1.0, 0.1)


def test_dimension_mismatch_errors():
    rng = np.random.default_rng(31)
    cfg, sc, f = _random_scenario_and_f(rng, 8, 2)
    with pytest.raises(ValueError):
        sinr(sc, f[:4, :], 0, 1.0, 0.1)
    with pytest.raises(ValueError):
        slnr(sc, f[:4, :], 0, 1.0, 0.1)
