"""Linear delta expansion for anharmonic oscillators with PMS and a Numerov oracle."""

from .hermite import HermiteCoeffs, Poly, from_hermite, hermite, to_hermite, working_precision
from .hierarchy import (
    ExpansionSolution,
    OscillatorSpec,
    ScaledCouplings,
    apply_perturbation,
    direct_energy,
    gamma_of,
    residual,
    scaled_couplings,
    solve_hierarchy,
    wavefunction,
)
from .observables import EnergyEstimate, QuadratureSettings, energy_direct, energy_variational, error_metric
from .oracle import OracleSolution, compare_wavefunction, numerov_solve
from .pms import PmsResult, pms, pms_direct, pms_variational, scan_omega

__version__ = "0.1.0"

__all__ = [
    "EnergyEstimate",
    "ExpansionSolution",
    "HermiteCoeffs",
    "OracleSolution",
    "OscillatorSpec",
    "PmsResult",
    "Poly",
    "QuadratureSettings",
    "ScaledCouplings",
    "apply_perturbation",
    "compare_wavefunction",
    "direct_energy",
    "energy_direct",
    "energy_variational",
    "error_metric",
    "from_hermite",
    "gamma_of",
    "hermite",
    "numerov_solve",
    "pms",
    "pms_direct",
    "pms_variational",
    "residual",
    "scaled_couplings",
    "scan_omega",
    "solve_hierarchy",
    "to_hermite",
    "wavefunction",
    "working_precision",
]
