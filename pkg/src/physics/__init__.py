# Free-fermion impurity physics
# =============================

from .model import (
    BathSpec,
    ImpuritySpec,
    JunctionSpec,
    SingleParticleHamiltonian,
    build_junction,
    build_single_bath,
    initial_correlation_matrix_junction,
    initial_correlation_matrix_single,
)
from .gaussian import (
    CorrelationEvolution,
    CorrelationMatrix,
    SpectralDecomposition,
    evolve,
    evolve_many,
    fermi,
    gibbs_correlation_matrix,
    mean_occupation,
    reduce_modes,
)
from .tridiag import TridiagonalizationResult, householder_tridiagonalize
from .fock import (
    FockDensityMatrix,
    ManyBodySpectrum,
    SectorStates,
    canonical_gibbs,
    correlations_from_density_matrix,
    density_matrix_from_correlations,
    full_negativity,
    default_particle_number,
    grand_canonical_gibbs_fock,
    mode_occupation,
    negativity,
    partial_negativities,
    partial_negativity,
    partial_transpose,
)

__all__ = [
    'BathSpec', 'ImpuritySpec', 'JunctionSpec', 'SingleParticleHamiltonian',
    'build_junction', 'build_single_bath',
    'initial_correlation_matrix_junction', 'initial_correlation_matrix_single',
    'CorrelationEvolution', 'CorrelationMatrix', 'SpectralDecomposition',
    'evolve', 'evolve_many', 'fermi', 'gibbs_correlation_matrix',
    'mean_occupation', 'reduce_modes',
    'TridiagonalizationResult', 'householder_tridiagonalize',
    'FockDensityMatrix', 'ManyBodySpectrum', 'SectorStates', 'canonical_gibbs',
    'correlations_from_density_matrix', 'density_matrix_from_correlations',
    'full_negativity', 'grand_canonical_gibbs_fock', 'negativity',
    'partial_negativities', 'partial_negativity', 'partial_transpose',
    'mode_occupation', 'default_particle_number',
]
