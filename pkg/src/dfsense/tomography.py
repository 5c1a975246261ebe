"""Three-qubit state tomography on simulated data.

Counts are multinomial draws from the Born probabilities in each of the
27 Pauli product bases; the density matrix is recovered by fixed-point
likelihood ascent (the R rho R iteration, diluted whenever a full step
would lower the likelihood) and error bars come from parametric
bootstrap resampling of the counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .statespace import DensityMatrix, SensorLevels, qubit_levels

__all__ = [
    "BasisCounts",
    "all_bases",
    "basis_projectors",
    "simulate_basis_counts",
    "simulate_all_bases",
    "reconstruct_mle",
    "ghz_fidelity",
    "coherence_amplitude",
    "bootstrap_errorbars",
]

DEFAULT_SHOTS = 480
DEFAULT_BOOTSTRAP = 300

# Single-qubit eigenbases, columns = eigenvectors for outcomes (0, 1)
# with eigenvalues (+1, -1).
_EIGENBASES = {
    "X": np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2),
    "Y": np.array([[1, 1], [1j, -1j]], dtype=complex) / math.sqrt(2),
    "Z": np.array([[1, 0], [0, 1]], dtype=complex),
}


def all_bases(n_qubits: int = 3) -> list[str]:
    """The 3^n Pauli product bases, e.g. 'XYZ'."""
    return ["".join(p) for p in product("XYZ", repeat=n_qubits)]


def basis_projectors(basis: str) -> np.ndarray:
    """(2^n, dim, dim) stack of rank-1 projectors, outcome bits big-endian."""
    vecs = None
    for pauli in basis:
        u = _EIGENBASES[pauli]
        vecs = u if vecs is None else np.kron(vecs, u)
    dim = vecs.shape[0]
    return np.stack([np.outer(vecs[:, k], vecs[:, k].conj()) for k in range(dim)])


@dataclass(frozen=True)
class BasisCounts:
    basis: str
    counts: np.ndarray
    shots: int

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=int)
        if c.sum() != self.shots:
            raise ValueError("counts must sum to the number of shots")
        object.__setattr__(self, "counts", c)
        self.counts.setflags(write=False)

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / self.shots


def born_probabilities(rho: DensityMatrix, basis: str) -> np.ndarray:
    projs = basis_projectors(basis)
    p = np.real(np.einsum("kij,ji->k", projs, rho.matrix))
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def simulate_basis_counts(rho: DensityMatrix, basis: str, shots: int,
                          rng: np.random.Generator) -> BasisCounts:
    """Multinomial draw from the Born probabilities in one product basis."""
    p = born_probabilities(rho, basis)
    counts = rng.multinomial(shots, p)
    return BasisCounts(basis=basis, counts=counts, shots=shots)


def simulate_all_bases(rho: DensityMatrix, shots: int = DEFAULT_SHOTS,
                       seed: int = 0) -> list[BasisCounts]:
    rng = np.random.default_rng(seed)
    return [simulate_basis_counts(rho, b, shots, rng) for b in all_bases()]


def _log_likelihood(rho_m: np.ndarray, projs: np.ndarray, counts: np.ndarray) -> float:
    p = np.real(np.einsum("kij,ji->k", projs, rho_m))
    p = np.clip(p, 1e-300, None)
    return float(np.sum(counts * np.log(p)))


def reconstruct_mle(counts_list, tol: float = 1e-10, max_iter: int = 10_000,
                    levels: SensorLevels | None = None):
    """Maximum-likelihood density matrix from multi-basis counts.

    Fixed-point iteration rho -> R rho R / tr with
    R = sum_k (f_k / p_k) Pi_k; whenever a full step would decrease the
    log-likelihood the step is diluted towards the identity until it does
    not, so the likelihood is nondecreasing.  Stops when the relative
    log-likelihood change drops below ``tol`` or after ``max_iter``
    iterations (then the result carries ``converged=False``).

    Returns (DensityMatrix, info dict).
    """
    counts_list = list(counts_list)
    if not counts_list:
        raise ValueError("need at least one measured basis")
    dim = basis_projectors(counts_list[0].basis).shape[1]
    projs = np.concatenate([basis_projectors(c.basis) for c in counts_list])
    counts = np.concatenate([c.counts for c in counts_list]).astype(float)
    n_bases = len(counts_list)

    rho = np.eye(dim, dtype=complex) / dim
    ll = _log_likelihood(rho, projs, counts)
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        p = np.real(np.einsum("kij,ji->k", projs, rho))
        p = np.clip(p, 1e-14, None)
        r = np.einsum("k,kij->ij", counts / p, projs) / (counts.sum() / n_bases)
        candidate = r @ rho @ r
        candidate /= np.trace(candidate).real
        new_ll = _log_likelihood(candidate, projs, counts)
        if new_ll < ll:
            # diluted step keeps the ascent monotone near the boundary
            eps = 1.0
            eye = np.eye(dim)
            while new_ll < ll and eps > 1e-8:
                eps *= 0.5
                g = eye + eps * r
                candidate = g @ rho @ g
                candidate /= np.trace(candidate).real
                new_ll = _log_likelihood(candidate, projs, counts)
            if new_ll < ll:
                converged = True
                break
        rho = 0.5 * (candidate + candidate.conj().T)
        if abs(new_ll - ll) <= tol * max(1.0, abs(ll)):
            ll = new_ll
            converged = True
            break
        ll = new_ll

    if levels is None:
        levels = qubit_levels([1.0] * int(round(math.log2(dim))))
    # clip tiny negative eigenvalues from float round-off
    lam, v = np.linalg.eigh(rho)
    lam = np.clip(lam, 0.0, None)
    rho = (v * lam) @ v.conj().T
    rho /= np.trace(rho).real
    dm = DensityMatrix(levels, rho)
    return dm, {"converged": converged, "iterations": iterations, "log_likelihood": ll}


def _pair_indices(levels: SensorLevels, pair):
    smax, smin = pair
    return levels.index(tuple(float(x) for x in smax)), levels.index(tuple(float(x) for x in smin))


def ghz_fidelity(rho: DensityMatrix, pair) -> float:
    """Overlap with the nearest GHZ state on the given basis pair.

    max_phi <GHZ_phi| rho |GHZ_phi> = (rho_ss + rho_s's')/2 + |rho_ss'|.
    """
    i, j = _pair_indices(rho.levels, pair)
    m = rho.matrix
    return float(np.real(m[i, i] + m[j, j]) / 2.0 + np.abs(m[i, j]))


def coherence_amplitude(rho: DensityMatrix, pair) -> float:
    """Parity fringe amplitude 2 |rho_{s, -s}| of the pair coherence."""
    i, j = _pair_indices(rho.levels, pair)
    return float(2.0 * np.abs(rho.matrix[i, j]))


def bootstrap_errorbars(counts_list, extractor, repeats: int = DEFAULT_BOOTSTRAP,
                        seed: int = 0, **mle_kwargs):
    """Bootstrap standard error of a reconstructed quantity.

    Resamples each basis multinomially from its observed frequencies,
    reconstructs, and applies ``extractor``; the reported value comes from
    the raw counts and the error bar is the standard deviation over the
    ``repeats`` resampled reconstructions.
    """
    if repeats < 2:
        raise ValueError("need at least two bootstrap repeats")
    counts_list = list(counts_list)
    rho_raw, _ = reconstruct_mle(counts_list, **mle_kwargs)
    value = extractor(rho_raw)
    rng = np.random.default_rng(seed)
    samples = np.empty(repeats)
    for r in range(repeats):
        resampled = [
            BasisCounts(c.basis, rng.multinomial(c.shots, c.frequencies), c.shots)
            for c in counts_list
        ]
        rho_b, _ = reconstruct_mle(resampled, **mle_kwargs)
        samples[r] = extractor(rho_b)
    return value, float(np.std(samples))
