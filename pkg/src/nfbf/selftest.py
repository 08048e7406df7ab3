"""Invariant suite runnable from the CLI.

Each check exercises one module's contracts on seeded random inputs and
validates every beamformer it emits (constant modulus for analog matrices,
unit column norms for hybrid composites). run_selftest returns the per-check
results; the CLI turns them into an exit status.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import random_scenario, scenario_from_json, scenario_to_json
from .codebook import CodewordIndex, beam_sweep, build_codebook
from .geometry import (
    ArrayConfig,
    CartesianCoord,
    PolarCoord,
    cartesian_to_polar,
    element_distance,
    farfield_steering,
    nearfield_steering,
    polar_to_cartesian,
    rayleigh_distance,
)
from .harness import ExperimentSpec, run_experiment
from .hbf import analog_beam_steering, effective_channel, hbf_wmmse, hbf_zf
from .metrics import beam_gain, sum_rate
from .mm import MMConfig, aobf_imperfect_csi, aobf_perfect_csi

MODULUS_TOL = 1e-9


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str = ""

    def line(self) -> str:
        status = "ok" if self.ok else "FAIL"
        suffix = f": {self.detail}" if self.detail else ""
        return f"{status:4s} {self.name}{suffix}"


def _check_geometry_roundtrip(rng) -> str:
    for _ in range(200):
        p = PolarCoord(rng.uniform(-np.pi / 2, np.pi / 2), rng.uniform(0.1, 100.0))
        c = polar_to_cartesian(p)
        p2 = cartesian_to_polar(CartesianCoord(c.x, c.y))
        if abs(p2.angle - p.angle) > 1e-12 or abs(p2.radius - p.radius) > 1e-12 * p.radius:
            return f"roundtrip drift at {p}"
    return ""


def _check_distance_oracle(rng) -> str:
    cfg = ArrayConfig(n_bs=16)
    for _ in range(200):
        p = PolarCoord(rng.uniform(-np.pi / 2, np.pi / 2), rng.uniform(1.0, 200.0))
        n = int(rng.integers(1, cfg.n_bs + 1))
        g = cfg.spacing * cfg.offsets()[n - 1]
        c = polar_to_cartesian(p)
        want = np.hypot(c.x - g, c.y)
        got = element_distance(cfg, p, n)
        if abs(got - want) > 1e-12 * max(1.0, want):
            return f"distance mismatch {got} vs {want}"
    return ""


def _check_steering_invariants(rng) -> str:
    cfg = ArrayConfig(n_bs=32)
    want = 1.0 / np.sqrt(cfg.n_bs)
    for _ in range(50):
        p = PolarCoord(rng.uniform(-np.pi / 2, np.pi / 2), rng.uniform(1.0, 500.0))
        u = nearfield_steering(cfg, p)
        if abs(np.linalg.norm(u) - 1.0) > 1e-12:
            return "near-field norm off"
        if np.max(np.abs(np.abs(u) - want)) > 1e-12:
            return "near-field modulus off"
        v = farfield_steering(cfg, p.angle)
        if abs(np.linalg.norm(v) - 1.0) > 1e-12:
            return "far-field norm off"
    far = PolarCoord(0.3, 1e4 * rayleigh_distance(cfg))
    u = nearfield_steering(cfg, far)
    v = farfield_steering(cfg, 0.3)
    phase = np.angle(u * v.conj())
    if np.max(np.abs(phase - phase.mean())) > 1e-3:
        return "near/far asymptote off"
    return ""


def _check_codebook_self_selection(rng) -> str:
    cfg = ArrayConfig(n_bs=8)
    cb = build_codebook(cfg, n_dis=6, beta=1.6)
    for p in range(1, cfg.n_bs + 1):
        for q in range(1, cb.n_dis + 1):
            idx = CodewordIndex(p, q)
            h = np.sqrt(cfg.n_bs) * cb.codeword(idx)
            got = beam_sweep(cb, h)
            if got != idx:
                return f"self-selection failed at {idx}: got {got}"
    return ""


def _check_aux_intervals(rng) -> str:
    from .codebook import auxiliary_points

    cfg = ArrayConfig(n_bs=16)
    cb = build_codebook(cfg, n_dis=8, beta=1.6)
    c_of = cfg.n_bs**2 * cfg.spacing**2 / (2.0 * cb.beta**2 * cfg.wavelength)
    for q in range(2, cb.n_dis):
        grid = auxiliary_points(cb, CodewordIndex(5, q), 3, 4)
        for r in range(3):
            cell = c_of * (1.0 - np.sin(grid.angles[r]) ** 2)
            v = grid.radii[r] / cell  # recovered 1/q_hat values
            if not np.all((v > 1.0 / (q + 1)) & (v < 1.0 / (q - 1))):
                return f"aux reciprocal out of cell at q={q}"
    return ""


def _check_channel_determinism(rng) -> str:
    cfg = ArrayConfig(n_bs=16)
    a = random_scenario(cfg, 3, 2, seed=123)
    b = random_scenario(cfg, 3, 2, seed=123)
    for ua, ub in zip(a.users, b.users):
        if not np.array_equal(ua.vector, ub.vector):
            return "same seed produced different channels"
    c = scenario_from_json(scenario_to_json(a))
    for ua, uc in zip(a.users, c.users):
        if np.max(np.abs(ua.vector - uc.vector)) > 1e-12:
            return "JSON roundtrip drift"
    return ""


def _check_metric_invariants(rng) -> str:
    cfg = ArrayConfig(n_bs=8)
    scen = random_scenario(cfg, 3, 2, seed=7)
    f, _ = aobf_perfect_csi(scen, MMConfig(t_max=50))
    base = sum_rate(scen, f, 1.0, 0.01)
    rot = f.matrix * np.exp(1j * 0.7)
    if abs(sum_rate(scen, rot, 1.0, 0.01) - base) > 1e-9:
        return "sum rate not phase invariant"
    for _ in range(50):
        loc = PolarCoord(rng.uniform(-np.pi / 2, np.pi / 2), rng.uniform(1.0, 30.0))
        col = rng.standard_normal(cfg.n_bs) + 1j * rng.standard_normal(cfg.n_bs)
        col /= np.linalg.norm(col)
        if beam_gain(cfg, col, loc) > 1.0 + 1e-12:
            return "beam gain above 1"
    return ""


def _check_mm_descent(rng) -> str:
    cfg = ArrayConfig(n_bs=16)
    mm = MMConfig(mu_mode="spectral")
    cb = build_codebook(cfg, n_dis=16, beta=1.6)
    for seed in range(5):
        scen = random_scenario(cfg, 3, 2, seed=seed)
        f, rep = aobf_perfect_csi(scen, mm)
        f.validate(MODULUS_TOL)
        for tr in rep.objective_trace:
            rises = np.diff(tr) > 1e-9 * np.abs(tr[:-1])
            if np.any(rises):
                return f"perfect-CSI objective rose (seed {seed})"
        idx = [beam_sweep(cb, u.vector) for u in scen.users]
        fi, repi = aobf_imperfect_csi(cb, idx, 2, 2, mm)
        fi.validate(MODULUS_TOL)
        for tr in repi.objective_trace:
            rises = np.diff(tr) > 1e-9 * np.abs(tr[:-1])
            if np.any(rises):
                return f"imperfect-CSI objective rose (seed {seed})"
    return ""


def _check_hbf_invariants(rng) -> str:
    cfg = ArrayConfig(n_bs=16)
    for seed in range(5):
        scen = random_scenario(cfg, 3, 2, seed=seed)
        f_ab = analog_beam_steering("perfect", scenario=scen)
        f_ab.validate(MODULUS_TOL)
        eff = effective_channel(f_ab, scen)
        zf = hbf_zf(f_ab, eff)
        zf.composite.validate(MODULUS_TOL)
        hh = scen.channel_matrix()
        cross = hh.conj().T @ zf.composite.matrix
        signal = np.min(np.abs(np.diag(cross)) ** 2)
        worst = np.max(np.abs(cross - np.diag(np.diag(cross))) ** 2)
        if worst > 1e-9 * signal:
            return f"ZF leakage too high (seed {seed})"
        wm, rep = hbf_wmmse(f_ab, eff, 1.0, 0.1)
        wm.composite.validate(MODULUS_TOL)
        if np.any(np.diff(rep.sumrate_trace) < -1e-9):
            return f"WMMSE trace decreased (seed {seed})"
    return ""


def _check_all_schemes_emit_valid_beamformers(rng) -> str:
    # the harness validates every emitted beamformer before computing metrics,
    # so a clean run certifies the constant-modulus / unit-norm invariants
    spec = ExperimentSpec(
        experiment="sumrate-vs-snr",
        trials=2,
        sweep=(10.0, 20.0),
        n_bs=16,
        k=3,
        l=2,
        n_dis=40,
        base_seed=3,
    )
    a = run_experiment(spec).to_csv()
    b = run_experiment(spec).to_csv()
    if a != b:
        return "harness output not deterministic"
    return ""


def run_selftest(seed: int = 0) -> list[CheckResult]:
    """Run every invariant check; returns one result per check."""
    checks = [
        ("geometry-roundtrip", _check_geometry_roundtrip),
        ("geometry-distance-oracle", _check_distance_oracle),
        ("geometry-steering-invariants", _check_steering_invariants),
        ("codebook-self-selection", _check_codebook_self_selection),
        ("codebook-aux-intervals", _check_aux_intervals),
        ("channel-determinism", _check_channel_determinism),
        ("metrics-invariants", _check_metric_invariants),
        ("mm-descent-and-modulus", _check_mm_descent),
        ("hbf-invariants", _check_hbf_invariants),
        ("harness-all-schemes-deterministic", _check_all_schemes_emit_valid_beamformers),
    ]
    rng = np.random.default_rng(seed)
    results = []
    for name, fn in checks:
        try:
            detail = fn(rng)
        except Exception as exc:  # a crash is a failed check, not a crashed suite
            detail = f"raised {type(exc).__name__}: {exc}"
        results.append(CheckResult(name=name, ok=not detail, detail=detail))
    return results
