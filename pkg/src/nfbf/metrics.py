"""Analytic link metrics: SINR, rates, SLNR, beam gain, and the power model."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import ArrayConfig, PolarCoord, nearfield_steering

ANALOG_ONLY = "analog-only"
HYBRID_COMPOSITE = "hybrid-composite"


@dataclass
class BeamformerMatrix:
    """(N, K) beamformer, one column per user.

    kind "analog-only" carries the constant-modulus invariant (every entry has
    modulus 1/sqrt(N)); kind "hybrid-composite" carries unit column norms (no
    power gain from the hybrid structure).
    """

    matrix: np.ndarray
    kind: str

    def validate(self, atol: float = 1e-9) -> None:
        """Raise ValueError if the kind-specific invariant is violated."""
        if self.kind == ANALOG_ONLY:
            want = 1.0 / np.sqrt(self.matrix.shape[0])
            err = np.max(np.abs(np.abs(self.matrix) - want))
            if err > atol:
                raise ValueError(f"constant-modulus violation: {err:.3e}")
        elif self.kind == HYBRID_COMPOSITE:
            norms = np.linalg.norm(self.matrix, axis=0)
            err = np.max(np.abs(norms - 1.0))
            if err > atol:
                raise ValueError(f"unit-column-norm violation: {err:.3e}")
        else:
            raise ValueError(f"unknown beamformer kind: {self.kind!r}")


@dataclass(frozen=True)
class PowerModel:
    """Component power draws (watts) for energy-efficiency accounting."""

    p_tx: float = 1.0
    p_rf: float = 0.026
    p_ps: float = 0.010
    p_bb: float = 0.200
    includes_baseband: bool = True

    def __post_init__(self):
        if min(self.p_tx, self.p_rf, self.p_ps, self.p_bb) < 0:
            raise ValueError("power components must be nonnegative")


def _matrix_of(f) -> np.ndarray:
    return np.asarray(getattr(f, "matrix", f))


def sinr(scenario, f, k: int, p: float, sigma2: float) -> float:
    """(P/K)|h_k^H f_k|^2 / ((P/K) sum_{i != k} |h_k^H f_i|^2 + sigma2)."""
    m = _matrix_of(f)
    h = scenario.users[k].vector
    if m.shape[0] != h.shape[0]:
        raise ValueError("dimension mismatch")
    kk = m.shape[1]
    gains = np.abs(h.conj() @ m) ** 2
    per_user = p / kk
    interference = per_user * (np.sum(gains) - gains[k])
    return float(per_user * gains[k] / (interference + sigma2))


def achievable_rate(sinr_value: float) -> float:
    """log2(1 + SINR) in bits/s/Hz."""
    return float(np.log2(1.0 + sinr_value))


def sum_rate(scenario, f, p: float, sigma2: float) -> float:
    """Sum of per-user achievable rates."""
    m = _matrix_of(f)
    return float(
        sum(achievable_rate(sinr(scenario, m, k, p, sigma2)) for k in range(m.shape[1]))
    )


def slnr(scenario, f, k: int, p: float, sigma2: float) -> float:
    """(P/K)|h_k^H f_k|^2 / ((P/K) sum_{i != k} |h_i^H f_k|^2 + sigma2).

    The leakage term measures the power user k's own beam deposits on the
    other users' channels.
    """
    m = _matrix_of(f)
    hh = scenario.channel_matrix()
    if m.shape[0] != hh.shape[0]:
        raise ValueError("dimension mismatch")
    kk = m.shape[1]
    leak = np.abs(hh.conj().T @ m[:, k]) ** 2
    per_user = p / kk
    leakage = per_user * (np.sum(leak) - leak[k])
    return float(per_user * leak[k] / (leakage + sigma2))


def beam_gain(cfg: ArrayConfig, f_column: np.ndarray, location: PolarCoord) -> float:
    """|u(location)^H f|^2; at most 1 for any unit-norm or analog column."""
    u = nearfield_steering(cfg, location)
    return float(np.abs(u.conj() @ np.asarray(f_column)) ** 2)


def beam_pattern_grid(cfg, f_column, angle_grid, radius_grid) -> np.ndarray:
    """Matrix of beam gains; entry (i, j) = gain at (angle_i, radius_j)."""
    angle_grid = np.asarray(angle_grid, dtype=float)
    radius_grid = np.asarray(radius_grid, dtype=float)
    if angle_grid.size == 0 or radius_grid.size == 0:
        raise ValueError("grids must be nonempty")
    f = np.asarray(f_column)
    g = cfg.spacing * cfg.offsets()
    out = np.empty((angle_grid.size, radius_grid.size))
    for i, a in enumerate(angle_grid):
        # distances to all elements for every radius at this angle, vectorized
        dist = np.sqrt(
            radius_grid[:, None] ** 2
            + g[None, :] ** 2
            - 2.0 * g[None, :] * radius_grid[:, None] * np.sin(a)
        )
        u = np.exp(-2j * np.pi * dist / cfg.wavelength) / np.sqrt(cfg.n_bs)
        out[i, :] = np.abs(u.conj() @ f) ** 2
    return out


def total_power(model: PowerModel, n_bs: int, n_rf: int) -> float:
    """P + N_RF P_RF + N_BS N_RF P_PS + (P_BB if the baseband stage is present)."""
    total = model.p_tx + n_rf * model.p_rf + n_bs * n_rf * model.p_ps
    if model.includes_baseband:
        total += model.p_bb
    return float(total)


def energy_efficiency(sum_rate_value: float, p_total: float) -> float:
    """Sum rate per watt."""
    if p_total <= 0:
        raise ValueError("total power must be positive")
    return float(sum_rate_value / p_total)


def noise_from_snr(p: float, k: int, snr_db: float) -> float:
    """sigma2 = P / (K * 10^(SNR_dB/10)), a scheme-independent operating point."""
    return float(p / (k * 10.0 ** (snr_db / 10.0)))
