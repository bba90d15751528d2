"""Exact spin-J simulation of a two-mode BEC in a symmetric double well.

Submodules: ``spin_algebra`` (operators, coherent states), ``model``
(Hamiltonian and parity blocks), ``spectral`` (eigensolvers, time evolution),
``observables`` (generalized purity, Q-function), ``qpt`` (top-state
transition sweeps and scaling fit), ``cli``.
"""

__version__ = "0.1.0"

from .errors import ContractError, CriticalRangeError, NumericalError, ValidationError
from .model import ModelParams, build_hamiltonian, derive_params, params_from_eta, parity_partition
from .observables import (
    SphereGrid,
    bloch_vector,
    count_local_maxima,
    generalized_purity,
    husimi_q,
)
from .qpt import find_critical, gp_vs_x, highest_energy_state, power_law_fit
from .spectral import eig_symmetric, evolve, evolve_series, extremal_eigenpair
from .spin_algebra import (
    QuantumState,
    SpinSpace,
    build_spin_operators,
    coherent_state,
    expectation,
    rotate_state,
)

__all__ = [
    "ContractError", "CriticalRangeError", "NumericalError", "ValidationError",
    "ModelParams", "build_hamiltonian", "derive_params", "params_from_eta", "parity_partition",
    "SphereGrid", "bloch_vector", "count_local_maxima", "generalized_purity", "husimi_q",
    "find_critical", "gp_vs_x", "highest_energy_state", "power_law_fit",
    "eig_symmetric", "evolve", "evolve_series", "extremal_eigenpair",
    "QuantumState", "SpinSpace", "build_spin_operators", "coherent_state", "expectation", "rotate_state",
]
