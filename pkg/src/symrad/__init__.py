"""Symplectic Radon transform of quantum states through the metaplectic representation."""

from .errors import (
    BadCoverage,
    NumericalGuard,
    SymradError,
    ValidationError,
)
from .gaussian import (
    GaussianRadonForm,
    MomentTriple,
    fit_K,
    gaussian_radon_closed_form,
    pauli_K,
    pauli_recover,
    profile_K_oracle,
    radon_matrix,
    transformed_V,
    wavepacket_from_moments,
)
from .metaplectic import (
    MetaplecticPlan,
    QuadraticFourierSpec,
    make_spec,
    metaplectic_apply,
    plan_metaplectic,
    quadratic_fourier,
)
from .radon import (
    RadonProfile,
    Sinogram,
    inverse_radon,
    radon_line_integral,
    radon_mixed,
    radon_profile,
    radon_surface_integral,
    sinogram,
)
from .states import (
    Axis,
    GaussianState,
    MixedState,
    WaveFunction,
    fourier_transform,
    hermite_state,
    l2_norm,
    sample_function,
    sample_gaussian,
)
from .symplectic import (
    AffineLagrangianPlane,
    RadonFrame,
    free_generating_function,
    is_symplectic,
    make_frame,
    polar_frame,
    symplectic_from_generating,
)
from .wigner import (
    WignerFunction,
    gaussian_wigner,
    marginal_momentum,
    marginal_position,
    wigner,
)

__version__ = "0.1.0"
