"""Exactly solvable spin-1/2 coupled to a planar quantum rotor."""

__version__ = "0.1.0"

from .entanglement import (
    BranchOverlap,
    ConsistencyError,
    EntanglementReport,
    RotorDensity,
    SuperposedState,
    branch_overlap,
    entanglement_report,
    evolve,
    min_purity_over_period,
    reduced_rotor,
    reduced_spin,
    two_sector_state,
)
from .model import (
    ModelParams,
    SectorSpectrum,
    classical_hamiltonian,
    effective_field,
    sector_propagator,
    sector_spectrum,
)

__all__ = [
    "BranchOverlap",
    "ConsistencyError",
    "EntanglementReport",
    "ModelParams",
    "RotorDensity",
    "SectorSpectrum",
    "SuperposedState",
    "branch_overlap",
    "classical_hamiltonian",
    "effective_field",
    "entanglement_report",
    "evolve",
    "min_purity_over_period",
    "reduced_rotor",
    "reduced_spin",
    "sector_propagator",
    "sector_spectrum",
    "two_sector_state",
]
