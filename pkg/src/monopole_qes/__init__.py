"""
Quasi-exactly solvable radial spectra of a scalar particle in a global
monopole background threaded by an Aharonov-Bohm flux line.
"""

__version__ = "0.1.0"

from .model import (  # noqa: E402
    FAMILIES,
    ConfigurationError,
    DefectGeometry,
    DomainError,
    FluxField,
    MolecularParams,
    NonPhysicalError,
    PotentialSpec,
    QuantumNumbers,
    UnsupportedRegimeError,
    effective_potential,
    potential_value,
    profile,
    reduce_potential,
)
from .spectra import (  # noqa: E402
    SpectrumRecord,
    degeneracy_report,
    energy_coulomb,
    energy_general_potential,
    energy_kratzer,
    energy_mie,
    energy_mie_constrained,
    energy_unconstrained,
    flux_shift_identity,
    spectrum_record,
)
from .oracle import RadialGrid, solve_radial_spectrum, verify_analytic  # noqa: E402
