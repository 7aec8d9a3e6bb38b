"""Random concave functions on the unit simplex from minima and softmins of random hyperplanes."""

from .duality import (
    ConstraintEnvelope,
    RegionSpec,
    TailEstimate,
    envelope_from_constraints,
    finite_dim_tail,
    region_contains,
    tail_probability,
    union_integral,
)
from .models import (
    ConstantIntensity,
    DomainError,
    IidExponential,
    IidUniform,
    IndependentGamma,
    NotSampleable,
    Unsupported,
    intensity_integral_mc,
    parse_model,
)
from .portfolio import (
    dirichlet_transport,
    expected_limit_function,
    fgp_map,
    portfolio_weight_density,
    portfolio_weight_sample,
    softmin_portfolio_combination,
)
from .rng import map_replicas, replica_rng
from .samplers import (
    DiagonalSpec,
    PoissonEnvelope,
    TruncationFailure,
    eval_deterministic_limit,
    eval_psi_tilde,
    hardmin_scale,
    sample_diagonal,
    sample_hardmin_scaled,
    sample_poisson_envelope,
    sample_softmin_fixed_lambda,
)
from .simplex import (
    Analytic,
    CompactSlice,
    EmptyEnsemble,
    PolyhedralMin,
    SoftminEnsemble,
    barycenter,
    check_concave_bounds,
    geometric_mean,
    metric_d,
    midpoint_violation,
)
from .softmin import softmin, softmin_weights
from .stokes import C2Generator, stokes_volume, stokes_volume_1d
