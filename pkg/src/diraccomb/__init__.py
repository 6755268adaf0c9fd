"""Generalized Dirac combs: point-interaction boundary conditions, bands and isospectral maps."""
from .bands import (
    BandStructure,
    Gap,
    Regime,
    RootFindOptions,
    ValenceRegime,
    band_gap,
    band_roots,
    compute_bands,
    gaps,
    spectrum_intervals,
    valence_regime_delta,
    valence_regime_metric,
)
from .boundary import (
    BoundaryCondition,
    Confinement,
    Couplings,
    NamedFamily,
    boundary_distance,
    cayley,
    confinement_class,
    from_matrix,
    identify_families,
    jump_average_matrix,
    kurasov_forward,
    kurasov_inverse,
    make_boundary,
    named,
    same_boundary,
    transfer_matrix,
    unitary_matrix,
)
from .estimator import DiracCombBands
from .exceptions import (
    DegenerateDenominatorError,
    NoCayleyFormError,
    NonBijectiveShiftError,
    ResolutionError,
    SingularRepresentationError,
)
from .isospectral import (
    DisplacementProfile,
    Discrete,
    Hearability,
    InvarianceReport,
    SymmetryElement,
    apply_symmetry,
    check_spectral_invariance,
    compose,
    coupling_fourier_modes,
    hearability,
    inverse,
    mirror_transform,
    oblique_orbit,
    oblique_transform,
    vertical_transform,
)
from .spectral import (
    bz_fold,
    spectral_det,
    spectral_negative,
    spectral_reduced,
    wavenumber,
)

__version__ = "0.1.0"
