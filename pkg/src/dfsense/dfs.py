"""Decoherence-free subspace enumeration and optimal sensing states.

Basis states are grouped by their noise energies eta_j = f_j . s; groups
of two or more span a DFS whose internal coherences survive overwhelming
correlated dephasing.  Within a DFS the best sensing state is the equal
superposition of the basis states with extremal signal generator
eigenvalues, reaching QFI = (spectral range)^2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .fields import FieldComponent, SensorLayout, noise_matrix
from .statespace import DiagonalGenerator, PureState, SensorLevels

__all__ = ["DfsRecord", "DfsSet", "enumerate_dfs", "spectral_range", "optimal_state", "best_dfs"]

# Grouping keys are rounded to this many decimals before hashing.
KEY_DECIMALS = 9


@dataclass(frozen=True)
class DfsRecord:
    """One decoherence-free subspace: noise energies and member basis states."""

    eta: tuple[float, ...]
    members: tuple[tuple[float, ...], ...]
    member_indices: tuple[int, ...]
    levels: SensorLevels

    @property
    def dim(self) -> int:
        return len(self.members)

    def projector(self) -> np.ndarray:
        p = np.zeros((self.levels.dim, self.levels.dim))
        for k in self.member_indices:
            p[k, k] = 1.0
        return p

    def contains(self, state: tuple[float, ...]) -> bool:
        return tuple(float(s) for s in state) in self.members


@dataclass(frozen=True)
class DfsSet:
    """All DFSs of a (levels, layout, noise) triple plus the unprotected rest."""

    records: tuple[DfsRecord, ...]
    perp_indices: tuple[int, ...]
    levels: SensorLevels

    def __iter__(self):
        return iter(self.records)

    def __len__(self) -> int:
        return len(self.records)

    def coherence_mask(self) -> np.ndarray:
        """Boolean (dim, dim) mask of the elements overwhelming noise keeps."""
        dim = self.levels.dim
        group = np.full(dim, -1, dtype=int)
        for gi, rec in enumerate(self.records):
            for k in rec.member_indices:
                group[k] = gi
        mask = np.eye(dim, dtype=bool)
        in_dfs = group >= 0
        same = (group[:, None] == group[None, :]) & in_dfs[:, None] & in_dfs[None, :]
        return mask | same

    def find(self, member: tuple[float, ...]) -> DfsRecord:
        member = tuple(float(s) for s in member)
        for rec in self.records:
            if member in rec.members:
                return rec
        raise KeyError(f"basis state {member} is not inside any DFS")


def enumerate_dfs(levels: SensorLevels, layout: SensorLayout,
                  noise: Sequence[FieldComponent]) -> DfsSet:
    """Group the product basis by noise energies; size >= 2 groups are DFSs.

    With no noise components every basis state shares the empty energy
    vector and the whole space is one DFS.
    """
    basis = levels.basis()
    s_arr = levels.basis_array()
    if len(noise) > 0:
        q = noise_matrix(noise, layout).entries
        energies = s_arr @ q.T
    else:
        energies = np.zeros((len(basis), 0))
    keys = [tuple(np.round(row, KEY_DECIMALS) + 0.0) for row in energies]

    groups: dict[tuple, list[int]] = {}
    for idx, key in enumerate(keys):
        groups.setdefault(key, []).append(idx)

    records = []
    perp: list[int] = []
    for key, idxs in groups.items():
        if len(idxs) >= 2:
            records.append(DfsRecord(
                eta=tuple(float(v) for v in key),
                members=tuple(basis[i] for i in idxs),
                member_indices=tuple(idxs),
                levels=levels,
            ))
        else:
            perp.extend(idxs)
    # Deterministic order: by energy vector, then members.
    records.sort(key=lambda r: (r.eta, r.member_indices))
    return DfsSet(records=tuple(records), perp_indices=tuple(sorted(perp)), levels=levels)


def spectral_range(dfs: DfsRecord, g: DiagonalGenerator):
    """(Delta, argmax member, argmin member) of G restricted to the DFS.

    Ties are broken by lexicographic basis order (the member with the
    smallest index wins).
    """
    vals = g.diag[list(dfs.member_indices)]
    imax = int(np.argmax(vals))
    imin = int(np.argmin(vals))
    delta = float(vals[imax] - vals[imin])
    return delta, dfs.members[imax], dfs.members[imin]


def optimal_state(dfs: DfsRecord, g: DiagonalGenerator) -> PureState:
    """(|s_max> + |s_min>)/sqrt(2); its QFI equals Delta^2."""
    delta, smax, smin = spectral_range(dfs, g)
    if delta <= 0.0:
        raise ValueError("spectral range is zero: no sensitivity in this DFS")
    return PureState.superposition(dfs.levels, [smax, smin])


def best_dfs(dfss, g: DiagonalGenerator) -> DfsRecord:
    """DFS with maximal spectral range; ties broken by smallest ||eta||,
    then lexicographic members."""
    records = list(dfss)
    if not records:
        raise ValueError("empty DFS list")
    scored = []
    for rec in records:
        delta, _, _ = spectral_range(rec, g)
        scored.append((-delta, float(np.linalg.norm(rec.eta)), rec.member_indices, rec))
    scored.sort(key=lambda t: t[:3])
    best = scored[0]
    if -best[0] <= 0.0:
        raise ValueError("every DFS has zero spectral range for this signal")
    return best[3]
