"""Product-basis Hilbert space over multi-level sensors.

Each sensor contributes a small set of levels labelled by a real
sensitivity value s; the joint basis is the lexicographic product of the
per-sensor level lists (first sensor slowest).  Signal evolution is
diagonal in this basis, generated by G[s] = kappa * t * sum_i f(x_i) s_i.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .fields import FieldComponent, SensorLayout

__all__ = [
    "SensorLevels",
    "PureState",
    "DensityMatrix",
    "DiagonalGenerator",
    "qubit_levels",
    "bold_levels",
    "d52_levels",
    "build_signal_generator",
    "evolve_signal",
    "variance",
]

NORM_TOL = 1e-12
TRACE_TOL = 1e-10
EIG_TOL = 1e-9


@dataclass(frozen=True)
class SensorLevels:
    """Ordered sensitivity labels for each sensor."""

    per_sensor: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        levels = tuple(tuple(float(s) for s in lv) for lv in self.per_sensor)
        for lv in levels:
            if len(set(lv)) != len(lv):
                raise ValueError("sensor levels must be distinct")
        object.__setattr__(self, "per_sensor", levels)

    @property
    def n_sensors(self) -> int:
        return len(self.per_sensor)

    @property
    def dim(self) -> int:
        d = 1
        for lv in self.per_sensor:
            d *= len(lv)
        return d

    def basis(self) -> list[tuple[float, ...]]:
        """All basis states in lexicographic order, first sensor slowest."""
        return list(product(*self.per_sensor))

    def basis_array(self) -> np.ndarray:
        """(dim, n_sensors) array of sensitivity labels, one row per state."""
        return np.asarray(self.basis(), dtype=float)

    def index(self, state: tuple[float, ...]) -> int:
        idx = 0
        for s, lv in zip(state, self.per_sensor):
            k = lv.index(float(s))
            idx = idx * len(lv) + k
        return idx


def qubit_levels(sensitivities) -> SensorLevels:
    """Two-level sensors with labels (-s_i, +s_i)."""
    return SensorLevels(tuple((-float(s), float(s)) for s in sensitivities))


def bold_levels() -> SensorLevels:
    """The (+-1, +-2, +-1) two-level encoding of three sensors."""
    return qubit_levels((1.0, 2.0, 1.0))


def d52_levels(n_sensors: int = 3) -> SensorLevels:
    """Full six-level manifold, sensitivities -2..3, per sensor."""
    return SensorLevels(tuple((-2.0, -1.0, 0.0, 1.0, 2.0, 3.0) for _ in range(n_sensors)))


@dataclass(frozen=True)
class PureState:
    levels: SensorLevels
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.levels.dim,):
            raise ValueError(f"amplitude vector must have length {self.levels.dim}")
        norm = np.vdot(amps, amps).real
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {norm} is not 1 within {NORM_TOL}")
        object.__setattr__(self, "amplitudes", amps)
        self.amplitudes.setflags(write=False)

    @staticmethod
    def from_amplitudes(levels: SensorLevels, amps) -> "PureState":
        amps = np.asarray(amps, dtype=complex)
        return PureState(levels, amps / np.linalg.norm(amps))

    @staticmethod
    def basis_state(levels: SensorLevels, state: tuple[float, ...]) -> "PureState":
        amps = np.zeros(levels.dim, dtype=complex)
        amps[levels.index(state)] = 1.0
        return PureState(levels, amps)

    @staticmethod
    def superposition(levels: SensorLevels, states, coeffs=None) -> "PureState":
        """Normalized superposition of the given basis states."""
        states = list(states)
        if coeffs is None:
            coeffs = [1.0] * len(states)
        amps = np.zeros(levels.dim, dtype=complex)
        for c, s in zip(coeffs, states):
            amps[levels.index(tuple(s))] += c
        return PureState.from_amplitudes(levels, amps)

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self.levels, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    levels: SensorLevels
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        d = self.levels.dim
        if m.shape != (d, d):
            raise ValueError(f"density matrix must be {d}x{d}")
        if np.max(np.abs(m - m.conj().T)) > NORM_TOL * max(1.0, np.max(np.abs(m))):
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > TRACE_TOL:
            raise ValueError(f"trace {np.trace(m).real} is not 1 within {TRACE_TOL}")
        object.__setattr__(self, "matrix", m)
        self.matrix.setflags(write=False)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def check_psd(self, tol: float = EIG_TOL) -> None:
        lo = float(self.eigenvalues().min())
        if lo < -tol:
            raise ValueError(f"density matrix has eigenvalue {lo} < -{tol}")


@dataclass(frozen=True)
class DiagonalGenerator:
    """Diagonal signal generator; ``diag[k]`` is G evaluated on basis state k."""

    levels: SensorLevels
    diag: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=float)
        if d.shape != (self.levels.dim,):
            raise ValueError(f"diagonal must have length {self.levels.dim}")
        object.__setattr__(self, "diag", d)
        self.diag.setflags(write=False)

    @property
    def spectral_range(self) -> float:
        return float(self.diag.max() - self.diag.min())


def build_signal_generator(layout: SensorLayout, signal: FieldComponent,
                           kappa: float, t: float,
                           levels: SensorLevels) -> DiagonalGenerator:
    """G[s] = kappa * t * sum_i f(x_i) * s_i over the product basis.

    ``signal`` is taken at unit strength; kappa in rad s^-1 pT^-1, t in s.
    """
    if len(layout) != levels.n_sensors:
        raise ValueError(
            f"layout has {len(layout)} sensors but levels describe {levels.n_sensors}"
        )
    f = signal.unit_shape(layout.x)
    diag = kappa * t * (levels.basis_array() @ f)
    return DiagonalGenerator(levels, diag)


def evolve_signal(state, g: DiagonalGenerator, strength: float):
    """Apply exp(-i * strength * G); returns the same kind of state."""
    phases = np.exp(-1j * strength * g.diag)
    if isinstance(state, PureState):
        if state.levels.dim != g.levels.dim:
            raise ValueError("state and generator dimensions differ")
        return PureState(state.levels, phases * state.amplitudes)
    if isinstance(state, DensityMatrix):
        if state.levels.dim != g.levels.dim:
            raise ValueError("state and generator dimensions differ")
        return DensityMatrix(state.levels, np.outer(phases, phases.conj()) * state.matrix)
    raise TypeError(f"cannot evolve {type(state).__name__}")


def variance(g: DiagonalGenerator, state: PureState) -> float:
    """<G^2> - <G>^2 on a pure state."""
    w = np.abs(state.amplitudes) ** 2
    mean = float(w @ g.diag)
    return float(w @ (g.diag ** 2)) - mean ** 2
