"""Numerical CFI maximization over separable states and product measurements.

The protocol search space is a product state (one complex vector per
sensor, global phases gauge-fixed) measured in the joint eigenbasis of a
product of Hermitian observables.  The objective is the classical Fisher
information of the outcome distribution after overwhelming correlated
dephasing, evaluated at zero signal field; it is maximized by
Nelder-Mead restarts from uniform random points in a parameter box.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .dfs import enumerate_dfs
from .fields import FieldComponent, SensorLayout
from .statespace import SensorLevels, build_signal_generator, bold_levels, d52_levels
from . import presets

__all__ = [
    "DegenerateObservableError",
    "SingularModelError",
    "CfiProblem",
    "OptimizerConfig",
    "RestartResult",
    "two_level_problem",
    "six_level_problem",
    "unpack_params",
    "cfi_objective",
    "cfi_from_vectors",
    "outcome_distribution",
    "optimize_cfi",
    "robustness_check",
    "reoptimize_with_depolarization",
]

DEGENERACY_RTOL = 1e-8
JITTER = 1e-8
DENOM_CUTOFF = 1e-12


class DegenerateObservableError(ValueError):
    """A sensor observable has (numerically) degenerate eigenvalues."""


class SingularModelError(ValueError):
    """An outcome has vanishing probability but nonvanishing derivative."""


@dataclass(frozen=True)
class CfiProblem:
    """Fixed data of one CFI optimization: basis, noise mask, generator."""

    levels: SensorLevels
    mask: np.ndarray          # coherences kept by the overwhelming channel
    g_diag: np.ndarray        # diagonal signal generator over the basis
    name: str = "custom"

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(len(lv) for lv in self.levels.per_sensor)

    @property
    def n_state_params(self) -> int:
        return sum(2 * d - 1 for d in self.dims)

    @property
    def n_obs_params(self) -> int:
        return sum(d * d for d in self.dims)

    @property
    def n_params(self) -> int:
        return self.n_state_params + self.n_obs_params


def build_problem(levels: SensorLevels, layout: SensorLayout,
                  noise: Sequence[FieldComponent], signal: FieldComponent,
                  kappa: float, t: float, name: str = "custom") -> CfiProblem:
    dfss = enumerate_dfs(levels, layout, noise)
    g = build_signal_generator(layout, signal, kappa, t, levels)
    return CfiProblem(levels=levels, mask=dfss.coherence_mask(),
                      g_diag=g.diag, name=name)


def two_level_problem() -> CfiProblem:
    """Three two-level sensors (+-1, +-2, +-1), constant+gradient noise."""
    return build_problem(bold_levels(), presets.paper_layout(),
                         presets.NOISE_CONST_GRADIENT, presets.SIGNAL_QUADRATIC,
                         presets.KAPPA, presets.SENSE_TIME, name="bold-two-level")


def six_level_problem() -> CfiProblem:
    """Three six-level sensors, constant+gradient noise, 141 parameters."""
    return build_problem(d52_levels(), presets.paper_layout(),
                         presets.NOISE_CONST_GRADIENT, presets.SIGNAL_QUADRATIC,
                         presets.KAPPA, presets.SENSE_TIME, name="full-six-level")


def unpack_params(problem: CfiProblem, x: np.ndarray):
    """Split a flat parameter vector into state vectors and observables.

    Per sensor of dimension d the state takes d real and d-1 imaginary
    parts (the last imaginary part is fixed to 0 to remove the global
    phase); the observable takes d diagonal entries, then the real and
    imaginary parts of the strict upper triangle.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.n_params,):
        raise ValueError(f"expected {problem.n_params} parameters, got {x.shape}")
    pos = 0
    states = []
    for d in problem.dims:
        a = x[pos:pos + d]
        b = np.append(x[pos + d:pos + 2 * d - 1], 0.0)
        pos += 2 * d - 1
        vec = a + 1j * b
        norm = np.linalg.norm(vec)
        if norm < 1e-12:
            raise ValueError("state parameters give a zero vector")
        states.append(vec / norm)
    observables = []
    for d in problem.dims:
        diag = x[pos:pos + d]
        pos += d
        n_off = d * (d - 1) // 2
        re = x[pos:pos + n_off]
        pos += n_off
        im = x[pos:pos + n_off]
        pos += n_off
        o = np.diag(diag).astype(complex)
        iu = np.triu_indices(d, k=1)
        o[iu] = re + 1j * im
        o[(iu[1], iu[0])] = re - 1j * im
        observables.append(o)
    return states, observables


def _eigh_checked(o: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(o)
    spread = float(vals[-1] - vals[0])
    gaps = np.diff(vals)
    if np.any(gaps < DEGENERACY_RTOL * max(spread, 1.0)):
        raise DegenerateObservableError("observable eigenvalues are degenerate")
    return vecs


_EINSUM_SPECS = {
    1: "sab,am,bm->sm",
    2: "sabcd,am,cm,bn,dn->smn",
    3: "sabcdef,am,dm,bn,en,co,fo->smno",
}
_EINSUM_PATHS: dict = {}


def _product_diag_stack(stack: np.ndarray, vs: list[np.ndarray]) -> np.ndarray:
    """diag(W^dag A W) for each A in the stack, W the product of ``vs``."""
    dims = tuple(v.shape[0] for v in vs)
    n = len(vs)
    if n not in _EINSUM_SPECS:
        raise NotImplementedError("product diagonal implemented for up to 3 sensors")
    t = stack.reshape(stack.shape[0], *dims, *dims)
    args = [t]
    for k, v in enumerate(vs):
        args.extend([v.conj(), v])
    # einsum path search is costly; cache it per shape signature
    key = (n, dims, stack.shape[0])
    spec = _EINSUM_SPECS[n]
    if key not in _EINSUM_PATHS:
        _EINSUM_PATHS[key] = np.einsum_path(spec, *args, optimize="optimal")[0]
    out = np.einsum(spec, *args, optimize=_EINSUM_PATHS[key])
    return out.reshape(stack.shape[0], -1)


def _product_diag(a: np.ndarray, vs: list[np.ndarray]) -> np.ndarray:
    """diag(W^dag A W) for W the Kronecker product of the given unitaries."""
    return _product_diag_stack(a[None], vs)[0]


def outcome_distribution(problem: CfiProblem, states, observables,
                         depolarization: float = 0.0):
    """Outcome probabilities and their field derivative at zero field."""
    psi = states[0]
    for s in states[1:]:
        psi = np.kron(psi, s)
    rho_n = np.outer(psi, psi.conj()) * problem.mask
    vecs = [_eigh_checked(o) for o in observables]
    both = _product_diag_stack(np.stack([rho_n, problem.g_diag[:, None] * rho_n]), vecs)
    den = np.real(both[0])
    dp = -2.0 * np.imag(both[1])
    if depolarization:
        dim = float(len(den))
        den = (1.0 - depolarization) * den + depolarization / dim
        dp = (1.0 - depolarization) * dp
    return den, dp


def cfi_from_vectors(problem: CfiProblem, states, observables,
                     depolarization: float = 0.0) -> float:
    p, dp = outcome_distribution(problem, states, observables, depolarization)
    dead = p < DENOM_CUTOFF
    if np.any(dead & (np.abs(dp) > DENOM_CUTOFF)):
        raise SingularModelError("zero-probability outcome with nonzero derivative")
    live = ~dead
    return float(np.sum(dp[live] ** 2 / p[live]))


def cfi_objective(problem: CfiProblem, x: np.ndarray,
                  depolarization: float = 0.0) -> float:
    """CFI at parameters ``x``; raises on degenerate observables."""
    states, observables = unpack_params(problem, x)
    return cfi_from_vectors(problem, states, observables, depolarization)


def _safe_objective(problem: CfiProblem, x: np.ndarray,
                    depolarization: float) -> float:
    try:
        return cfi_objective(problem, x, depolarization)
    except DegenerateObservableError:
        xj = np.array(x, dtype=float)
        pos = problem.n_state_params
        for d in problem.dims:
            xj[pos:pos + d] += JITTER * np.arange(1, d + 1)
            pos += d * d
        try:
            return cfi_objective(problem, xj, depolarization)
        except (DegenerateObservableError, SingularModelError):
            return 0.0
    except SingularModelError:
        return 0.0


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 10
    cycles: int = 3               # Nelder-Mead reruns per restart
    max_fev_per_cycle: int = 6000
    fatol: float = 1e-8
    xatol: float = 1e-6
    box: float = 1.0              # uniform initial box half-width


@dataclass(frozen=True)
class RestartResult:
    restart: int
    value: float
    n_evaluations: int
    jittered: bool = False


def _local_search(problem: CfiProblem, x0: np.ndarray, config: OptimizerConfig,
                  depolarization: float = 0.0):
    x = np.asarray(x0, dtype=float)
    best = _safe_objective(problem, x, depolarization)
    nfev = 1
    for _ in range(config.cycles):
        res = minimize(lambda z: -_safe_objective(problem, z, depolarization), x,
                       method="Nelder-Mead",
                       options={"maxfev": config.max_fev_per_cycle,
                                "fatol": config.fatol, "xatol": config.xatol,
                                "adaptive": True})
        nfev += res.nfev
        if -res.fun > best:
            best = -res.fun
            x = res.x
    return x, best, nfev


def optimize_cfi(restriction: str = "full-six-level",
                 config: OptimizerConfig = OptimizerConfig(),
                 seed: int = 0, problem: CfiProblem | None = None):
    """Random-restart Nelder-Mead maximization of the post-noise CFI.

    ``restriction`` picks the built-in problem ("bold-two-level" or
    "full-six-level"); pass ``problem`` to override.  Returns
    (best params, best CFI, restart log); deterministic for a given seed.
    """
    if problem is None:
        if restriction == "bold-two-level":
            problem = two_level_problem()
        elif restriction == "full-six-level":
            problem = six_level_problem()
        else:
            raise ValueError(f"unknown restriction {restriction!r}")
    rng = np.random.default_rng(seed)
    log: list[RestartResult] = []
    best_x = None
    best_f = -np.inf
    for r in range(config.restarts):
        x0 = rng.uniform(-config.box, config.box, size=problem.n_params)
        x, f, nfev = _local_search(problem, x0, config)
        log.append(RestartResult(restart=r, value=f, n_evaluations=nfev))
        if f > best_f:
            best_f, best_x = f, x
    # The reported optimum must re-evaluate to the reported value.
    assert abs(_safe_objective(problem, best_x, 0.0) - best_f) <= 1e-9 * max(1.0, best_f)
    return best_x, best_f, log


def robustness_check(problem: CfiProblem, params: np.ndarray, eps: float) -> float:
    """CFI of the outcome model mixed with uniform noise of weight eps."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError("depolarization probability must be in [0, 1]")
    return _safe_objective(problem, np.asarray(params, dtype=float), eps)


def reoptimize_with_depolarization(problem: CfiProblem, params: np.ndarray,
                                   eps: float, config: OptimizerConfig):
    """Re-run the local search under the depolarized objective.

    Returns (params under eps, CFI under eps, noise-free CFI at those
    parameters) so callers can verify that the optimum region is stable.
    """
    x, f_eps, _ = _local_search(problem, np.asarray(params, dtype=float),
                                config, depolarization=eps)
    return x, f_eps, _safe_objective(problem, x, 0.0)
