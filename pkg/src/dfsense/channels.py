"""Quantum channels: correlated dephasing, qutrit amplitude damping,
and per-qubit depolarizing.

Correlated dephasing multiplies each density matrix element (s, s') by
the characteristic function of the integrated noise strength evaluated at
kappa * (s - s') . f for every noise component; the overwhelming limit
keeps exactly the diagonal plus the coherences inside decoherence-free
subspaces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dfs import DfsSet
from .fields import FieldComponent, SensorLayout, noise_matrix
from .statespace import DensityMatrix

__all__ = [
    "NoiseDistribution",
    "IntegratedNoiseModel",
    "overwhelming_dephasing",
    "finite_dephasing",
    "amplitude_damping_qutrit",
    "amplitude_damping_probability",
    "qutrit_kraus",
    "depolarize_independent",
]


@dataclass(frozen=True)
class NoiseDistribution:
    """Distribution of one integrated noise field strength (pT s units).

    kind: "gaussian" (scale = standard deviation), "uniform" on
    (-scale, scale), or "overwhelming" (kills every sensitive element).
    """

    kind: str
    scale: float = 0.0

    def __post_init__(self):
        if self.kind not in ("gaussian", "uniform", "overwhelming"):
            raise ValueError(f"unsupported distribution kind {self.kind!r}")
        if self.scale < 0:
            raise ValueError("scale must be >= 0")

    def characteristic(self, u: np.ndarray) -> np.ndarray:
        """E[exp(-i * u * B)] for the integrated field strength B."""
        u = np.asarray(u, dtype=float)
        if self.kind == "gaussian":
            return np.exp(-0.5 * (self.scale * u) ** 2)
        if self.kind == "uniform":
            return np.sinc(self.scale * u / np.pi)
        return (u == 0.0).astype(float)


@dataclass(frozen=True)
class IntegratedNoiseModel:
    """One distribution per independent noise component."""

    distributions: tuple[NoiseDistribution, ...]

    @staticmethod
    def gaussian(sigmas: Sequence[float]) -> "IntegratedNoiseModel":
        return IntegratedNoiseModel(tuple(NoiseDistribution("gaussian", s) for s in sigmas))

    @staticmethod
    def overwhelming(n: int) -> "IntegratedNoiseModel":
        return IntegratedNoiseModel(tuple(NoiseDistribution("overwhelming") for _ in range(n)))


def overwhelming_dephasing(rho: DensityMatrix, dfss: DfsSet) -> DensityMatrix:
    """Keep diagonal elements and coherences inside any DFS; zero the rest."""
    if dfss.levels.dim != rho.levels.dim:
        raise ValueError("DFS set and state are over different bases")
    mask = dfss.coherence_mask()
    return DensityMatrix(rho.levels, np.where(mask, rho.matrix, 0.0))


def finite_dephasing(rho: DensityMatrix, noise: Sequence[FieldComponent],
                     layout: SensorLayout, model: IntegratedNoiseModel,
                     kappa: float) -> DensityMatrix:
    """Multiply element (s, s') by prod_j chi_j(kappa * (s - s') . f_j)."""
    if len(noise) != len(model.distributions):
        raise ValueError("one distribution per noise component is required")
    s_arr = rho.levels.basis_array()
    q = noise_matrix(noise, layout).entries
    energies = s_arr @ q.T                      # (dim, k)
    factor = np.ones((rho.levels.dim, rho.levels.dim))
    for j, dist in enumerate(model.distributions):
        mismatch = energies[:, j][:, None] - energies[:, j][None, :]
        # Exact zeros for protected elements regardless of float noise.
        mismatch[np.abs(mismatch) < 1e-10] = 0.0
        factor *= dist.characteristic(kappa * mismatch)
    return DensityMatrix(rho.levels, rho.matrix * factor)


def amplitude_damping_probability(t: float, tau: float) -> float:
    """Decay probability p(t) = 1 - exp(-t / tau)."""
    if t < 0 or tau <= 0:
        raise ValueError("need t >= 0 and tau > 0")
    return 1.0 - math.exp(-t / tau)


def qutrit_kraus(p: float) -> list[np.ndarray]:
    """Kraus operators of the single-qutrit decay map, level order (e1, e2, g)."""
    k0 = np.diag([math.sqrt(1.0 - p), math.sqrt(1.0 - p), 1.0]).astype(complex)
    k1 = np.zeros((3, 3), dtype=complex)
    k1[0, 1] = math.sqrt(p)     # e2 -> e1
    k2 = np.zeros((3, 3), dtype=complex)
    k2[2, 0] = math.sqrt(p)     # e1 -> g
    return [k0, k1, k2]


def _apply_single_site_kraus(rho: np.ndarray, kraus, site: int, n_sites: int,
                             local_dim: int) -> np.ndarray:
    """Sum_K (K_site rho K_site^dag) applied on one tensor factor."""
    shape = (local_dim,) * (2 * n_sites)
    t = rho.reshape(shape)
    out = np.zeros_like(t)
    for k in kraus:
        # contract K onto the ket index of `site`, K* onto the bra index
        tk = np.tensordot(k, t, axes=([1], [site]))
        tk = np.moveaxis(tk, 0, site)
        tk = np.tensordot(tk, k.conj(), axes=([n_sites + site], [1]))
        tk = np.moveaxis(tk, -1, n_sites + site)
        out += tk
    return out.reshape(rho.shape)


def amplitude_damping_qutrit(rho: DensityMatrix, t: float, tau: float) -> DensityMatrix:
    """Independent amplitude damping on three qutrits (27-dim input)."""
    if rho.levels.dim != 27:
        raise ValueError("amplitude damping expects a three-qutrit (27-dim) state")
    p = amplitude_damping_probability(t, tau)
    kraus = qutrit_kraus(p)
    m = rho.matrix.copy()
    for site in range(3):
        m = _apply_single_site_kraus(m, kraus, site, 3, 3)
    return DensityMatrix(rho.levels, m)


def depolarize_independent(rho: DensityMatrix, p: Sequence[float]) -> DensityMatrix:
    """Per-qubit full depolarization: rho -> (1-p_i) rho + p_i tr_i(rho) x I/2."""
    if rho.levels.dim != 8:
        raise ValueError("depolarize_independent expects a three-qubit (8-dim) state")
    probs = [float(x) for x in p]
    if len(probs) != 3 or any(x < 0 or x > 1 for x in probs):
        raise ValueError("need three probabilities in [0, 1]")
    m = rho.matrix.copy()
    for site, pi in enumerate(probs):
        shape = (2,) * 6
        t = m.reshape(shape)
        # tr_i(rho) (x) I/2 in place of sensor `site`
        traced = np.trace(t, axis1=site, axis2=3 + site)
        mixed = np.zeros_like(t)
        idx_ket = [slice(None)] * 6
        for b in range(2):
            idx = list(idx_ket)
            idx[site] = b
            idx[3 + site] = b
            mixed[tuple(idx)] = traced / 2.0
        m = ((1.0 - pi) * t + pi * mixed).reshape(8, 8)
    return DensityMatrix(rho.levels, m)
