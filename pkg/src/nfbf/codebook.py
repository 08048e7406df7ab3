"""Polar-domain near-field codebook, beam sweeping, and auxiliary points.

The codebook samples N_BS angles uniformly in the sin domain and, per angle,
N_DIS distance rings whose radii fall off as 1/q. Beam sweeping scores every
codeword against a channel and returns the best (p, q) index. Auxiliary points
subdivide the selected codeword's angular and reciprocal-distance cell to form
a surrogate channel support for imperfect-CSI beamformer design.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .geometry import ArrayConfig, PolarCoord

DEFAULT_N_DIS = 320
DEFAULT_BETA = 1.6


@dataclass(frozen=True)
class CodewordIndex:
    """1-based codebook index: angle bin p in [1, N_BS], ring q in [1, N_DIS]."""

    p: int
    q: int


@dataclass
class PolarCodebook:
    """Immutable angle-by-distance grid of unit-norm near-field codewords."""

    array: ArrayConfig
    n_dis: int
    beta: float
    angles: np.ndarray  # (P,) grid angles, strictly increasing
    radii: np.ndarray  # (P, Q) ring radii, strictly decreasing in q
    codewords: np.ndarray  # (P, Q, N) complex

    def codeword(self, idx: CodewordIndex) -> np.ndarray:
        self._check(idx)
        return self.codewords[idx.p - 1, idx.q - 1]

    def location(self, idx: CodewordIndex) -> PolarCoord:
        self._check(idx)
        return PolarCoord(float(self.angles[idx.p - 1]), float(self.radii[idx.p - 1, idx.q - 1]))

    def flat(self) -> np.ndarray:
        """(P*Q, N) view of the codewords, row-major in (p, q)."""
        n = self.array.n_bs
        return self.codewords.reshape(-1, n)

    def _check(self, idx: CodewordIndex) -> None:
        if not (1 <= idx.p <= self.array.n_bs and 1 <= idx.q <= self.n_dis):
            raise ValueError("codeword index out of bounds")


@dataclass
class AuxiliaryGrid:
    """R x S polar locations tiling a codeword's angular/distance cell."""

    angles: np.ndarray  # (R,)
    radii: np.ndarray  # (R, S)
    r_count: int
    s_count: int

    def point(self, r: int, s: int) -> PolarCoord:
        """Location of the (r, s)th auxiliary point (0-based indices)."""
        return PolarCoord(float(self.angles[r]), float(self.radii[r, s]))

    def locations(self) -> list[PolarCoord]:
        """All R*S points, row-major."""
        return [self.point(r, s) for r in range(self.r_count) for s in range(self.s_count)]


def grid_angle(n_bs: int, p, r_count: int = 1) -> np.ndarray:
    """Angle of bin p on an r_count-times refined sin-domain grid.

    With r_count=1 this is the codebook angle arcsin((2p-1)/N - 1); refined
    grids place r_count angles inside each original bin.
    """
    p = np.asarray(p, dtype=float)
    return np.arcsin((2.0 * p - 1.0) / (r_count * n_bs) - 1.0)


def ring_radius(cfg: ArrayConfig, sin_angle, q, beta: float) -> np.ndarray:
    """Ring radius N^2 d^2 (1 - sin^2) / (2 q beta^2 wavelength)."""
    sin_angle = np.asarray(sin_angle, dtype=float)
    q = np.asarray(q, dtype=float)
    c = cfg.n_bs**2 * cfg.spacing**2 / (2.0 * beta**2 * cfg.wavelength)
    return c * (1.0 - sin_angle**2) / q


def build_codebook(
    cfg: ArrayConfig, n_dis: int = DEFAULT_N_DIS, beta: float = DEFAULT_BETA
) -> PolarCodebook:
    """Construct the polar codebook for the given array."""
    if n_dis < 1:
        raise ValueError("n_dis must be >= 1")
    if beta <= 0:
        raise ValueError("beta must be positive")
    n = cfg.n_bs
    angles = grid_angle(n, np.arange(1, n + 1))
    q = np.arange(1, n_dis + 1, dtype=float)
    radii = ring_radius(cfg, np.sin(angles)[:, None], q[None, :], beta)
    g = cfg.spacing * cfg.offsets()
    sin_a = np.sin(angles)[:, None, None]
    r = radii[:, :, None]
    dist = np.sqrt(r * r + g * g - 2.0 * g * r * sin_a)
    codewords = np.exp(-2j * np.pi * dist / cfg.wavelength) / np.sqrt(n)
    return PolarCodebook(
        array=cfg, n_dis=n_dis, beta=beta, angles=angles, radii=radii, codewords=codewords
    )


def beam_sweep(
    cb: PolarCodebook,
    h: np.ndarray,
    noise_sigma2: float = 0.0,
    rng: np.random.Generator | None = None,
) -> CodewordIndex:
    """Best codeword index argmax_{p,q} |h^H v_{p,q}|.

    Scoring is noiseless by default (the pilot procedure is abstracted); with
    noise_sigma2 > 0 a CN(0, noise_sigma2) sample is added to each complex
    score before taking the magnitude. Ties break to the smallest (p, q).
    """
    h = np.asarray(h)
    if np.linalg.norm(h) == 0:
        raise ValueError("cannot sweep a zero channel")
    scores = cb.flat() @ h.conj()
    if noise_sigma2 > 0:
        if rng is None:
            raise ValueError("noisy sweeping needs an rng")
        m = scores.shape[0]
        scores = scores + np.sqrt(noise_sigma2 / 2.0) * (
            rng.standard_normal(m) + 1j * rng.standard_normal(m)
        )
    idx = int(np.argmax(np.abs(scores)))  # first max = lexicographic smallest
    return CodewordIndex(p=idx // cb.n_dis + 1, q=idx % cb.n_dis + 1)


def auxiliary_points(
    cb: PolarCodebook, idx: CodewordIndex, r_count: int, s_count: int
) -> AuxiliaryGrid:
    """R x S auxiliary locations inside codeword idx's cell.

    Angles refine the selected sin-domain bin into r_count sub-bins. Distances
    are midpoints of s_count equal subintervals of the selected ring's cell in
    the reciprocal ring domain v = 1/q: the cell spans the midpoints toward
    rings q-1 and q+1. The outermost ring (q = 1) has no outer neighbor; its
    cell extends to the Rayleigh distance, whose reciprocal image is
    8 beta^2 - 1/q independent of the array.
    """
    if r_count < 1 or s_count < 1:
        raise ValueError("r_count and s_count must be >= 1")
    cb._check(idx)
    n = cb.array.n_bs
    p_hat = r_count * (idx.p - 1) + np.arange(1, r_count + 1)
    ang = grid_angle(n, p_hat, r_count)
    sin_a = np.sin(ang)

    q = float(idx.q)
    a_here = 1.0 / q
    a_inner = 1.0 / (q + 1.0)
    a_outer = (8.0 * cb.beta**2 - 1.0 / q) if idx.q == 1 else 1.0 / (q - 1.0)
    s = np.arange(1, s_count + 1, dtype=float)
    v = (a_here + a_inner) / 2.0 + (a_outer - a_inner) * (2.0 * s - 1.0) / (4.0 * s_count)

    c = cb.array.n_bs**2 * cb.array.spacing**2 / (2.0 * cb.beta**2 * cb.array.wavelength)
    radii = c * (1.0 - sin_a[:, None] ** 2) * v[None, :]
    return AuxiliaryGrid(angles=ang, radii=radii, r_count=r_count, s_count=s_count)


def approximate_channel_matrices(
    cb: PolarCodebook, grids: list[AuxiliaryGrid]
) -> list[np.ndarray]:
    """Per-user stacks of steering vectors at the auxiliary points.

    Returns one (R*S, N) array per grid, rows ordered row-major like
    AuxiliaryGrid.locations(); these act as the surrogate channel support for
    imperfect-CSI design.
    """
    if not grids:
        raise ValueError("grids must be nonempty")
    cfg = cb.array
    g = cfg.spacing * cfg.offsets()
    out = []
    for grid in grids:
        sin_a = np.sin(grid.angles)[:, None, None]
        r = grid.radii[:, :, None]
        dist = np.sqrt(r * r + g * g - 2.0 * g * r * sin_a)
        u = np.exp(-2j * np.pi * dist / cfg.wavelength) / np.sqrt(cfg.n_bs)
        out.append(u.reshape(-1, cfg.n_bs))
    return out


def export_codebook_csv(cb: PolarCodebook, path: str) -> None:
    """Write (p, q, angle_rad, radius_wavelengths) rows for inspection."""
    lam = cb.array.wavelength
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["p", "q", "angle_rad", "radius_wavelengths"])
        for p in range(cb.array.n_bs):
            for q in range(cb.n_dis):
                w.writerow([p + 1, q + 1, repr(float(cb.angles[p])), repr(float(cb.radii[p, q] / lam))])
