"""C1 blended smoothing splines on Riemannian manifolds.

Each anchor's tangent space hosts an exact Euclidean natural cubic smoothing
spline of the lifted data; neighbouring tangent-space curves are mapped back
with the exponential and blended geodesically with a smoothstep weight. Only
``exp`` and ``log`` of the manifold are ever used.
"""

from .blend import (
    AnchorSet,
    BlendedSpline,
    FitProblem,
    JunctionGap,
    evaluate,
    fit,
    fit_arrays,
    junction_report,
    lift_data,
    misfit,
    select_anchors,
    speed,
    weight,
)
from .errors import BlendSplineError, DomainError, InvalidInputError, WellPosednessError
from .manifold import (
    CountingManifold,
    Euclidean,
    Manifold,
    ManifoldDescriptor,
    ManifoldKind,
    Point,
    Rotations,
    Sphere,
    TangentVector,
    make_manifold,
)
from .oracle import DiscretizedCurve, discretized_energy_min, energy_of
from .serialize import dumps_model, load_model, loads_model, save_model
from .spline1d import (
    CubicSegment,
    KnotGrid,
    SmoothingSpline,
    bending_energy,
    eval_spline,
    eval_spline_deriv,
    restrict_to_window,
    solve_smoothing_spline,
)

__all__ = [
    "AnchorSet", "BlendedSpline", "FitProblem", "JunctionGap", "evaluate", "fit", "fit_arrays",
    "junction_report", "lift_data", "misfit", "select_anchors", "speed", "weight",
    "BlendSplineError", "DomainError", "InvalidInputError", "WellPosednessError",
    "CountingManifold", "Euclidean", "Manifold", "ManifoldDescriptor", "ManifoldKind", "Point",
    "Rotations", "Sphere", "TangentVector", "make_manifold",
    "DiscretizedCurve", "discretized_energy_min", "energy_of",
    "dumps_model", "load_model", "loads_model", "save_model",
    "CubicSegment", "KnotGrid", "SmoothingSpline", "bending_energy", "eval_spline",
    "eval_spline_deriv", "restrict_to_window", "solve_smoothing_spline",
]
