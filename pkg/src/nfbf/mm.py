"""Constant-modulus beamformer design by majorization-minimization.

Per user k the design minimizes a leakage-regularized objective
-|h_k^H f|^2 + omega * sum_{i != k} |h_i^H f|^2 over unit-modulus-entry
vectors. Each iteration majorizes the objective by a linear surrogate and
minimizes it in closed form: f <- (1/sqrt(N)) exp(j angle(G f)), where G folds
the target outer product, the weighted interference outer products, and a
mu-scaled identity that certifies the surrogate.

Two regimes are provided: perfect CSI (channel vectors known) and imperfect
CSI, where each user's channel is represented by steering vectors at auxiliary
points around a swept codeword and the same update runs on those surrogate
outer products.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .codebook import (
    AuxiliaryGrid,
    CodewordIndex,
    PolarCodebook,
    approximate_channel_matrices,
    auxiliary_points,
)
from .metrics import ANALOG_ONLY, BeamformerMatrix

MU_SPECTRAL = "spectral"
MU_PAPER_EXACT = "paper-exact"
_MU_MODES = (MU_SPECTRAL, MU_PAPER_EXACT)


@dataclass(frozen=True)
class MMConfig:
    """MM loop parameters.

    mu_mode selects the additive constant that certifies the interference
    surrogate. "spectral" uses per-interferer ||h_i||^2 in the perfect-CSI
    update and the top eigenvalue of the total interference matrix in the
    imperfect-CSI update (both certified majorizers, so the objective descent
    is guaranteed). "paper-exact" uses the shared worst-case constant
    max_i ||h_i||^2 for perfect CSI and the literal 1/N per auxiliary point
    for imperfect CSI (not a certified majorizer there; descent may fail).
    None picks per-regime defaults: spectral (perfect), paper-exact
    (imperfect).
    """

    omega: float = 1000.0
    epsilon: float = 1e-9
    t_max: int = 1000
    mu_mode: str | None = None

    def __post_init__(self):
        if self.omega < 0:
            raise ValueError("omega must be nonnegative")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.t_max < 1:
            raise ValueError("t_max must be >= 1")
        if self.mu_mode is not None and self.mu_mode not in _MU_MODES:
            raise ValueError(f"unknown mu_mode: {self.mu_mode!r}")

    def resolved_mu(self, default: str) -> str:
        return default if self.mu_mode is None else self.mu_mode


@dataclass
class MMReport:
    """Per-user diagnostics of one design run.

    objective_trace[k][0] is the objective at the initial point, followed by
    one value per iteration. With spectral mu the trace is nonincreasing.
    """

    iterations_used: list[int] = field(default_factory=list)
    objective_trace: list[np.ndarray] = field(default_factory=list)
    converged: list[bool] = field(default_factory=list)


def slnr_objective(h_all, f_col, k: int, omega: float) -> float:
    """-|h_k^H f|^2 + omega * sum_{i != k} |h_i^H f|^2."""
    if not 0 <= k < len(h_all):
        raise ValueError("bad user index")
    f = np.asarray(f_col)
    gains = np.array([np.abs(np.asarray(h).conj() @ f) ** 2 for h in h_all])
    return float(-gains[k] + omega * (np.sum(gains) - gains[k]))


def _phase_step(g_mat: np.ndarray, f: np.ndarray) -> np.ndarray:
    """One closed-form surrogate minimization: project G f onto unit phases.

    Entries where (G f) is exactly zero keep the previous entry (any phase is
    optimal there; retention keeps the update deterministic).
    """
    n = f.shape[0]
    gf = g_mat @ f
    out = np.exp(1j * np.angle(gf)) / np.sqrt(n)
    zero = gf == 0
    if np.any(zero):
        out[zero] = f[zero]
    return out


def _perfect_update_matrix(hh: np.ndarray, k: int, cfg: MMConfig) -> np.ndarray:
    """G = h_k h_k^H - omega sum_{i != k}(h_i h_i^H - mu_i I)."""
    n, kk = hh.shape
    others = [i for i in range(kk) if i != k]
    g = np.outer(hh[:, k], hh[:, k].conj())
    if others:
        ho = hh[:, others]
        g = g - cfg.omega * (ho @ ho.conj().T)
        norms2 = np.sum(np.abs(ho) ** 2, axis=0)
        if cfg.resolved_mu(MU_SPECTRAL) == MU_SPECTRAL:
            mu_total = float(np.sum(norms2))
        else:
            mu_total = float(norms2.max()) * len(others)
        g = g + cfg.omega * mu_total * np.eye(n)
    return g


def mm_update_perfect(h_all, f_col, k: int, cfg: MMConfig) -> np.ndarray:
    """One perfect-CSI MM iteration for user k's column."""
    hh = np.stack([np.asarray(h) for h in h_all], axis=1)
    if not 0 <= k < hh.shape[1]:
        raise ValueError("bad user index")
    return _phase_step(_perfect_update_matrix(hh, k, cfg), np.asarray(f_col))


def _run_mm(g_mat: np.ndarray, f0: np.ndarray, cfg: MMConfig, objective) -> tuple:
    """Iterate the phase update from f0; returns (f, iterations, trace, converged)."""
    f = f0
    trace = [objective(f)]
    converged = False
    t = 0
    for t in range(1, cfg.t_max + 1):
        f_new = _phase_step(g_mat, f)
        trace.append(objective(f_new))
        diff = float(np.sum(np.abs(f_new - f) ** 2))
        f = f_new
        if diff <= cfg.epsilon:
            converged = True
            break
    return f, t, np.array(trace), converged


def aobf_perfect_csi(scenario, cfg: MMConfig | None = None) -> tuple[BeamformerMatrix, MMReport]:
    """Design all K analog columns from exact channels.

    Each column starts at the conjugate-phase beamformer of its user's channel
    and iterates the MM update until the squared step norm drops to epsilon or
    t_max is hit.
    """
    if cfg is None:
        cfg = MMConfig()
    hh = scenario.channel_matrix()
    n, kk = hh.shape
    cols = np.empty((n, kk), dtype=complex)
    report = MMReport()
    for k in range(kk):
        f0 = np.exp(1j * np.angle(hh[:, k])) / np.sqrt(n)
        g = _perfect_update_matrix(hh, k, cfg)
        h_list = [hh[:, i] for i in range(kk)]
        obj = lambda f: slnr_objective(h_list, f, k, cfg.omega)  # noqa: E731
        f, t, trace, conv = _run_mm(g, f0, cfg, obj)
        cols[:, k] = f
        report.iterations_used.append(t)
        report.objective_trace.append(trace)
        report.converged.append(conv)
    return BeamformerMatrix(matrix=cols, kind=ANALOG_ONLY), report


def _aux_outer(us: np.ndarray) -> np.ndarray:
    """sum over rows u of u u^H for a (M, N) stack of steering vectors."""
    return us.T @ us.conj()


def _imperfect_update_matrix(aux_all: list[np.ndarray], k: int, cfg: MMConfig) -> np.ndarray:
    """G for the imperfect-CSI update built from auxiliary steering stacks."""
    n = aux_all[k].shape[1]
    others = [i for i in range(len(aux_all)) if i != k]
    g = _aux_outer(aux_all[k])
    if others:
        z_int = np.zeros((n, n), dtype=complex)
        count = 0
        for i in others:
            z_int += _aux_outer(aux_all[i])
            count += aux_all[i].shape[0]
        if cfg.resolved_mu(MU_PAPER_EXACT) == MU_SPECTRAL:
            mu_total = float(np.linalg.eigvalsh(z_int)[-1])
        else:
            mu_total = count / n
        g = g - cfg.omega * z_int + cfg.omega * mu_total * np.eye(n)
    return g


def mm_update_imperfect(aux_vectors_all, f_col, k: int, cfg: MMConfig) -> np.ndarray:
    """One imperfect-CSI MM iteration for user k's column.

    aux_vectors_all holds one (R*S, N) steering stack per user, as returned by
    approximate_channel_matrices.
    """
    aux_all = [np.asarray(u) for u in aux_vectors_all]
    if not 0 <= k < len(aux_all):
        raise ValueError("bad user index")
    return _phase_step(_imperfect_update_matrix(aux_all, k, cfg), np.asarray(f_col))


def imperfect_objective(aux_vectors_all, f_col, k: int, omega: float) -> float:
    """Surrogate-support objective: -sum_rs |u_k^H f|^2 + omega * leakage."""
    f = np.asarray(f_col)
    totals = np.array([np.sum(np.abs(np.asarray(u).conj() @ f) ** 2) for u in aux_vectors_all])
    return float(-totals[k] + omega * (np.sum(totals) - totals[k]))


def aobf_imperfect_csi(
    cb: PolarCodebook,
    indices: list[CodewordIndex],
    r_count: int,
    s_count: int,
    cfg: MMConfig | None = None,
) -> tuple[BeamformerMatrix, MMReport]:
    """Design all K analog columns from swept codeword indices.

    Column k starts at the selected codeword, and iterates the MM update on
    steering vectors at the R x S auxiliary points of each user's cell. Fully
    deterministic given inputs.
    """
    if cfg is None:
        cfg = MMConfig()
    grids: list[AuxiliaryGrid] = [
        auxiliary_points(cb, idx, r_count, s_count) for idx in indices
    ]
    aux_all = approximate_channel_matrices(cb, grids)
    n = cb.array.n_bs
    kk = len(indices)
    cols = np.empty((n, kk), dtype=complex)
    report = MMReport()
    for k in range(kk):
        f0 = cb.codeword(indices[k]).copy()
        g = _imperfect_update_matrix(aux_all, k, cfg)
        obj = lambda f: imperfect_objective(aux_all, f, k, cfg.omega)  # noqa: E731
        f, t, trace, conv = _run_mm(g, f0, cfg, obj)
        cols[:, k] = f
        report.iterations_used.append(t)
        report.objective_trace.append(trace)
        report.converged.append(conv)
    return BeamformerMatrix(matrix=cols, kind=ANALOG_ONLY), report
