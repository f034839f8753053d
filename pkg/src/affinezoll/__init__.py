"""Affine surfaces M(c): curvature, geodesics, symmetries and almost-Zoll quotients."""
from .core import (
    ChartDomainError,
    ConnectionField,
    DegenerateInvariantError,
    GeometryError,
    ScalarField,
    alpha_invariant,
    christoffel_at,
    curvature_at,
    hessian,
    nabla_ricci_at,
    quasi_einstein_residual,
    ricci_at,
)
from .geodesics import (
    GeodesicCurve,
    GeodesicDomainError,
    TangentState,
    Trajectory,
    closed_form_geodesic,
    focusing_point,
    geodesic_domain,
    integrate_geodesic,
    speed,
)
from .quotients import (
    ClosureReport,
    Outcome,
    QuotientSurface,
    SweepReport,
    almost_zoll_sweep,
    classify_geodesic,
    cylinder,
    equivariance_check,
    moebius,
    project,
)
from .surfaces import (
    ChartMap,
    InconclusiveSpanError,
    Kind,
    SingularJacobianError,
    SurfaceFamily,
    make_surface,
    parse_surface_id,
    projective_modify,
    pullback_connection,
    pullback_scalar,
    qe_span_equal,
    z3_chart,
    z3_rotation,
)
from .symmetry import (
    AffineMapParams,
    LieAlgebraTable,
    NotClosedError,
    VectorField2,
    apply_T,
    bracket,
    compose_T,
    invert_T,
    killing_basis,
    killing_residual,
    structure_constants,
)

__version__ = "0.1.0"

__all__ = [
    "AffineMapParams",
    "almost_zoll_sweep",
    "alpha_invariant",
    "apply_T",
    "bracket",
    "ChartDomainError",
    "ChartMap",
    "christoffel_at",
    "classify_geodesic",
    "closed_form_geodesic",
    "ClosureReport",
    "compose_T",
    "ConnectionField",
    "curvature_at",
    "cylinder",
    "DegenerateInvariantError",
    "equivariance_check",
    "focusing_point",
    "geodesic_domain",
    "GeodesicCurve",
    "GeodesicDomainError",
    "GeometryError",
    "hessian",
    "InconclusiveSpanError",
    "integrate_geodesic",
    "invert_T",
    "killing_basis",
    "killing_residual",
    "Kind",
    "LieAlgebraTable",
    "make_surface",
    "moebius",
    "nabla_ricci_at",
    "NotClosedError",
    "Outcome",
    "parse_surface_id",
    "project",
    "projective_modify",
    "pullback_connection",
    "pullback_scalar",
    "qe_span_equal",
    "quasi_einstein_residual",
    "QuotientSurface",
    "ricci_at",
    "ScalarField",
    "SingularJacobianError",
    "speed",
    "structure_constants",
    "SurfaceFamily",
    "SweepReport",
    "TangentState",
    "Trajectory",
    "VectorField2",
    "z3_chart",
    "z3_rotation",
]
