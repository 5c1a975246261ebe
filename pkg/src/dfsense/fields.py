"""Spatial field components, sensor layouts, and the noise matrix.

A scalar field over a line of sensors is decomposed into components
``B(x) = sum_j B^j * f_j(x)`` where each unit-strength spatial shape
``f_j`` is either a Taylor monomial ``x**k / k!`` (so order 0 is a
constant, order 1 a gradient, order 2 a curvature with the conventional
1/2) or a table of per-sensor samples.  Stacking the unit-strength shapes
evaluated at the sensor positions gives the noise matrix ``Q``; a
decoherence-free subspace exists exactly when ``Q`` has a nontrivial
kernel, i.e. ``rank(Q) < l`` for ``l`` sensors.

Positions are in micrometres, polynomial strengths in pT * um^-k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

__all__ = [
    "FieldComponent",
    "SensorLayout",
    "NoiseMatrix",
    "field_vector",
    "noise_matrix",
    "dfs_exists",
    "kernel_direction",
    "minimal_sensor_count",
    "RANK_RTOL",
]

# Singular values below RANK_RTOL times the largest are treated as zero.
RANK_RTOL = 1e-10


@dataclass(frozen=True)
class FieldComponent:
    """One spatial component of a scalar field.

    ``kind`` is ``"poly"`` (shape ``x**order / order!``) or ``"table"``
    (one sample per sensor position, in layout order).  ``strength``
    multiplies the unit shape and is 1.0 for the unit-strength vectors
    that enter the noise matrix.
    """

    kind: str = "poly"
    order: int = 0
    strength: float = 1.0
    samples: tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.kind not in ("poly", "table"):
            raise ValueError(f"unknown field component kind {self.kind!r}")
        if self.kind == "poly" and self.order < 0:
            raise ValueError("polynomial order must be >= 0")

    @staticmethod
    def poly(order: int, strength: float = 1.0) -> "FieldComponent":
        return FieldComponent(kind="poly", order=order, strength=strength)

    @staticmethod
    def table(samples: Sequence[float], strength: float = 1.0) -> "FieldComponent":
        return FieldComponent(kind="table", strength=strength,
                              samples=tuple(float(s) for s in samples))

    def unit_shape(self, x: np.ndarray) -> np.ndarray:
        """Evaluate the unit-strength spatial shape at positions ``x``."""
        x = np.asarray(x, dtype=float)
        if self.kind == "poly":
            return x ** self.order / math.factorial(self.order)
        if len(self.samples) != x.shape[0]:
            raise ValueError(
                f"tabulated component has {len(self.samples)} samples "
                f"but the layout has {x.shape[0]} positions"
            )
        return np.asarray(self.samples, dtype=float)


# Common shorthands.
constant = FieldComponent.poly(0)
gradient = FieldComponent.poly(1)
quadratic = FieldComponent.poly(2)


@dataclass(frozen=True)
class SensorLayout:
    """Sensor positions along a line, in micrometres, strictly increasing."""

    positions: tuple[float, ...]

    def __post_init__(self):
        pos = tuple(float(x) for x in self.positions)
        if len(pos) == 0:
            raise ValueError("layout needs at least one sensor")
        if any(b <= a for a, b in zip(pos, pos[1:])):
            raise ValueError("positions must be strictly increasing")
        object.__setattr__(self, "positions", pos)

    def __len__(self) -> int:
        return len(self.positions)

    @property
    def x(self) -> np.ndarray:
        return np.asarray(self.positions, dtype=float)

    @property
    def spacing(self) -> float:
        """Nearest-neighbour distance d for an equidistant layout."""
        diffs = np.diff(self.x)
        if len(diffs) == 0:
            raise ValueError("spacing is undefined for a single sensor")
        if not np.allclose(diffs, diffs[0], rtol=1e-12, atol=1e-12):
            raise ValueError("layout is not equidistant")
        return float(diffs[0])

    @staticmethod
    def equidistant(n: int, d: float = 1.0) -> "SensorLayout":
        """``n`` sensors centred on the origin with spacing ``d``."""
        offsets = (np.arange(n) - (n - 1) / 2.0) * d
        return SensorLayout(tuple(offsets))


@dataclass(frozen=True)
class NoiseMatrix:
    """k x l matrix with ``Q[j, i]`` the unit shape of noise j at sensor i."""

    entries: np.ndarray

    def __post_init__(self):
        q = np.atleast_2d(np.asarray(self.entries, dtype=float))
        object.__setattr__(self, "entries", q)
        self.entries.setflags(write=False)

    @property
    def n_sensors(self) -> int:
        return self.entries.shape[1]

    @property
    def rank(self) -> int:
        sv = np.linalg.svd(self.entries, compute_uv=False)
        if sv.size == 0 or sv[0] == 0.0:
            return 0
        return int(np.sum(sv > RANK_RTOL * sv[0]))


def field_vector(component: FieldComponent, layout: SensorLayout) -> np.ndarray:
    """Field strength of one component at every sensor position."""
    return component.strength * component.unit_shape(layout.x)


def noise_matrix(noise: Sequence[FieldComponent], layout: SensorLayout) -> NoiseMatrix:
    """Stack the unit-strength field vectors of the noise components."""
    if len(noise) == 0:
        raise ValueError("need at least one noise component")
    rows = [comp.unit_shape(layout.x) for comp in noise]
    return NoiseMatrix(np.vstack(rows))


def dfs_exists(q: NoiseMatrix) -> bool:
    """True when the noise matrix has a nontrivial kernel (rank < l)."""
    return q.rank < q.n_sensors


def kernel_direction(q: NoiseMatrix) -> np.ndarray:
    """Direction of the one-dimensional kernel of ``Q``.

    Scaled so the largest absolute component is exactly 1, with the first
    nonzero component positive.  Raises if the kernel dimension is 0 (no
    protected direction) or >= 2 (ambiguous; enumerate DFSs instead).
    """
    kdim = q.n_sensors - q.rank
    if kdim == 0:
        raise ValueError("kernel dimension 0: no DFS for this noise matrix")
    if kdim >= 2:
        raise ValueError(
            f"kernel dimension {kdim} is ambiguous; pick a state via DFS enumeration"
        )
    _, _, vh = np.linalg.svd(q.entries)
    vec = vh[-1]
    imax = int(np.argmax(np.abs(vec)))
    vec = vec / np.abs(vec[imax])
    for v in vec:
        if abs(v) > 1e-12:
            if v < 0:
                vec = -vec
            break
    vec = vec.copy()
    # Snap the extremal component to +-1 exactly (the contract max|r| = 1).
    vec[np.abs(np.abs(vec) - 1.0) < 1e-14] = np.sign(vec[np.abs(np.abs(vec) - 1.0) < 1e-14])
    return vec


def minimal_sensor_count(noise: Sequence[FieldComponent],
                         candidate_positions: Sequence[float]) -> int:
    """Smallest number of candidate positions that admits a DFS.

    Searches subsets in increasing size; for ``k`` linearly independent
    noise shapes this is ``k + 1`` whenever enough positions are offered.
    """
    pos = [float(x) for x in candidate_positions]
    if len(set(pos)) != len(pos):
        raise ValueError("candidate positions must be distinct")
    for size in range(1, len(pos) + 1):
        for subset in combinations(sorted(pos), size):
            if dfs_exists(noise_matrix(noise, SensorLayout(subset))):
                return size
    raise ValueError("no DFS with these positions")
