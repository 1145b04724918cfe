"""Inverse mean curvature flow by parallel hypersurfaces in space forms.

A mean-convex isoparametric hypersurface flows by sliding through its
parallel family; the whole evolution reduces to one scalar distance
function mu(t) solving a product equation in the transported curvature
factors.  This package computes that flow in closed form, checks it
against independent numeric routes (ODE integration, Newton continuation,
finite-difference curvature oracles) and exports meshes of the flowing
surfaces.
"""

__version__ = "0.1.0"

from .closedform import (
    EndpointLimit,
    FlowProfile,
    MinimalInvariants,
    flow_curvatures,
    limit_summary,
    mean_convex_bound,
    minimal_invariants,
    profile_from_dict,
    profile_to_dict,
    solve,
    solve_euclidean,
    solve_horosphere,
    solve_hyperbolic_cylinder,
    solve_hyperbolic_umbilic,
    solve_sphere,
)
from .errors import (
    AtPole,
    DegenerateSample,
    DomainError,
    FactorNonPositive,
    FocalDegeneracy,
    ImcfError,
    NoConvergence,
    NoEvent,
    NonMeanConvex,
    NotOnQuadric,
    NotUnitNormal,
    NumericalError,
    OutOfInterval,
    PreconditionError,
    SpectrumMismatch,
    UnknownName,
    WrongSpaceForm,
)
from .geomviz import (
    BallNormReport,
    FlowSample,
    Mesh,
    ball_norm_limit_check,
    export_mesh,
    export_obj,
    export_ply,
    figure_scene,
    flow_surface,
    poincare_ball,
    sample_to_mesh,
    spectra_close,
    stereographic,
    stereographic_inverse,
)
from .isocatalog import (
    EXAMPLE_NAMES,
    Immersion,
    check_isoparametric,
    euclidean_spectrum,
    example_immersion,
    hyperbolic_spectrum,
    perturbed_torus_immersion,
    spectrum_from_dict,
    spectrum_to_dict,
    sphere_spectrum_from_k1,
    sphere_spectrum_from_s,
    verify_identities,
)
from .numflow import (
    BoundaryEvent,
    BoundaryKind,
    NumericPath,
    continuation_sweep,
    estimate_boundary,
    integrate_mu,
    is_extension,
    path_from_dict,
    path_to_dict,
    solve_product_equation,
)
from .spaceform import (
    EUCLIDEAN,
    HYPERBOLIC,
    SPHERICAL,
    ParallelData,
    PrincipalSpectrum,
    SpaceForm,
    c_eps,
    log_product,
    mean_curvature_mu,
    mean_curvature_parallel,
    parallel_curvature,
    parallel_data,
    parallel_normal,
    parallel_point,
    s_eps,
    transport_pair,
    transport_product,
    validate_normal,
    validate_point,
)
