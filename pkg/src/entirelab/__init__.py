"""Numerical laboratory for the dynamics of transcendental entire maps."""

from .branches import (
    AsymptoticCurve,
    BranchState,
    DiscOfUnivalence,
    Obstruction,
    ObstructionKind,
    Tract,
    asymptotic_curve_toward,
    boundary_separation,
    continue_branch,
    decay_along_curve,
    discs_of_univalence,
    trace_asymptotic_curve,
    tract_angular_measure,
)
from .catalog import (
    EntireMap,
    EvalResult,
    EvalStatus,
    MapKind,
    OverflowDirection,
    f1,
    f2,
    f3,
    lambda_exp,
    model_f1,
    model_f2,
    model_for,
    parse_map_id,
    scaled,
    semiconjugacy_residual,
)
from .dynamics import (
    BakerReport,
    CertificateStatus,
    EscapePolicy,
    ExpansionReport,
    FixedPointRecord,
    HyperbolicityCertificate,
    OrbitResult,
    OrbitStatus,
    PostsingularReport,
    PostsingularStatus,
    StabilityClass,
    WanderingReport,
    baker_domain_check,
    certify_hyperbolic,
    classify_multiplier,
    expansion_report,
    find_fixed_points,
    iterate,
    postsingular_orbit,
    wandering_orbit_check,
)
from .instability import (
    FixedPointPath,
    InstabilityResult,
    PathSample,
    WindingResult,
    continue_fixed_point,
    find_instability_parameter,
    winding_number,
    zeros_of_f1,
)
from .metrics import (
    ConformalMetric,
    Region,
    SamplerConfig,
    ScanReport,
    complement_of_discs,
    cylindrical,
    deriv_norm,
    eta_omega_scan,
    pullback,
    eta_scan,
    euclidean,
    exterior_of_radius,
    hyperbolic_exact,
    hyperbolic_lower_estimate,
    poly_decay,
    poly_decay_scan,
    right_half_plane,
    spherical,
    spherical_expansion_scan,
    unit_disc,
    whole_plane,
)

from .render import (
    Classifier,
    Image,
    RasterConfig,
    basin_class,
    classify_pixel,
    render_raster,
    write_image,
)

__version__ = "0.1.0"
