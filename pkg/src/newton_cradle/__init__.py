"""Closed-form spectral dynamics of rank-one updates ``S + mu |v><v|``."""
from .adiabatic import (
    AdiabaticSchedule,
    SatInstance,
    build_3sat_hamiltonian,
    gap_trajectory,
    mixer_hamiltonian,
    narrowing_criterion,
    parse_dimacs,
    random_3sat,
    stepped_schedule,
)
from .composer import compose_sum, partial_sum_trace, rank_one_decompose
from .core import (
    CradleConfig,
    SpectralDecomposition,
    cradle_from_spectrum,
    eigendecompose,
    make_cradle,
)
from .exceptions import (
    AmbiguousGap,
    CayleySingular,
    CradleError,
    DegenerateSpectrum,
    DimensionCapExceeded,
    FrozenLevelsError,
    InputError,
    IntermediateDegeneracy,
    InvalidAnchor,
    InvalidProfile,
    NotHermitian,
    NotUnitary,
    NumericalError,
)
from .kernel import basis_matrix, overlap_magnitudes, overlap_row, overlap_rows
from .sampling import SampledSignal, reconstruct, resample, sample
from .secular import (
    asymptotes,
    detect_level_repulsion,
    eigenvalues_at,
    interlace_by_deletion,
    mu_of_s,
    solve,
    trajectory,
    velocities_at,
)
from .unitary import (
    UnitaryCradle,
    alpha_of_mu,
    cayley_to_hermitian,
    cayley_to_unitary,
    complex_velocity,
    eigenphases_at,
    make_unitary_cradle,
    mu_of_alpha,
)

__version__ = "0.1.0"
