"""Fractional-heat smoothness toolkit on periodic grids."""
from .errors import NumericalError, ValidationError
from .grid import (
    PeriodicGrid,
    SampledFunction,
    Spectrum,
    apply_multiplier,
    from_spectrum,
    nyquist_realize,
    resample,
    shift_eval,
    to_spectrum,
)
from .heat import (
    FracHeatParams,
    HeatDerivField,
    TimeGrid,
    derivative_bound_probe,
    frac_laplacian_apply,
    heat_deriv_field,
    kernel_decay_probe,
    kernel_values,
    semigroup_apply,
    space_time_deriv,
)
from .smoothness import (
    DiffModulus,
    lambda_s_norm_diff,
    lambda_s_seminorm_diff,
    lambda_s_seminorm_heat,
    make_lacunary,
    make_mode,
    make_random_decay,
    make_smoothstep,
    modulus,
    standard_family,
    sym_diff,
)
from .ballavg import (
    approx_error,
    ball_avg_apply,
    coeffs_c,
    coeffs_c_fractions,
    localization_constant,
    m_ell,
    multiplier_shape_report,
)
from .hyperbolic import (
    SpaceTimeSet,
    carleson_M,
    hyperbolic_distance_field,
    mu_measure,
    neighborhood,
    property_I_check,
    rho,
)
from .wavelets import (
    DyadicCube,
    LatticeSpec,
    WaveletCoeffs,
    WaveletSystem,
    doubling_probe,
    dwt,
    idwt,
    lambda_X_norm,
    lattice_norm,
    v0_set,
)
from .badsets import (
    DiffField,
    EpsSweep,
    bad_set_D,
    bad_set_S,
    diff_field,
    distance_proxies,
    distance_upper_oracle,
    eps_sweep,
    theta_profile,
    verify_prop_61,
    verify_prop_62,
    verify_prop_63,
)

__version__ = "0.1.0"
