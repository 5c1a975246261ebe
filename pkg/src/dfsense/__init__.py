"""Distributed quantum sensing in spatially correlated noise.

Builds decoherence-free subspaces over multi-level sensors, the optimal
entangled and separable sensing protocols, Fisher-information precision
bounds, and seeded Monte Carlo estimation campaigns.
"""

from .fields import (FieldComponent, NoiseMatrix, SensorLayout, dfs_exists,
                     field_vector, kernel_direction, minimal_sensor_count,
                     noise_matrix)
from .statespace import (DensityMatrix, DiagonalGenerator, PureState,
                         SensorLevels, bold_levels, build_signal_generator,
                         d52_levels, evolve_signal, qubit_levels, variance)
from .dfs import DfsRecord, DfsSet, best_dfs, enumerate_dfs, optimal_state, spectral_range
from .channels import (IntegratedNoiseModel, NoiseDistribution,
                       amplitude_damping_probability, amplitude_damping_qutrit,
                       depolarize_independent, finite_dephasing,
                       overwhelming_dephasing, qutrit_kraus)
from .metrology import (ParityModel, cfi, improvement_db, parity_cfi,
                        parity_from_state, parity_observable, qfi_pure,
                        rmse_bound, sld_and_qfi)
from .estimation import (CampaignResult, ShotRecord, SignalResult, fit_parity,
                         mle, normalized_rmse, random_guess_rmse, run_campaign,
                         sample_shots, select_phases, shots_scaling, stream)
from . import calib, presets, tomography

__version__ = "0.1.0"
