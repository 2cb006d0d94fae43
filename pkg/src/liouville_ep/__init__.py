"""Exact characterization of Liouvillian exceptional points.

Layers, bottom up:

  poly      exact Gaussian-rational polynomial/matrix arithmetic
  expr      expression grammar for model files and round-trip formatting
  models    Lindblad superoperator construction and built-in models
  newton    Newton polygons, root valuations, tropical cross-check
  numerics  root finding, eigenvalue tracking, amoebas, scaling fits
  scan      resultant-based degeneracy scans and EP classification
  cli       command-line front end (liouville-ep)
"""

from .poly import (
    ExactDivisionError,
    GaussRational,
    MultiPoly,
    PolyMatrix,
    det_bareiss,
    det_cofactor,
    gcd_univariate,
    sylvester_resultant,
)
from .expr import ParseError, format_poly, parse_expression
from .models import (
    EPSILON,
    OMEGA,
    OMEGA0,
    BuiltinModel,
    JumpChannel,
    ModelSpec,
    Superoperator,
    build_liouvillian,
    builtin_model,
    char_poly,
    channel_refill,
    flatten_index,
    generic_perturbation,
    model_from_dict,
    perturbation_matrix,
)
from .newton import (
    EPReport,
    NewtonPoint,
    NewtonPolygon,
    Segment,
    TentacleDirection,
    TropicalFunction,
    assert_routes_agree,
    ep_orders,
    lower_hull,
    newton_points,
    tentacle_directions,
    tropical_roots,
    tropicalize,
)
from .numerics import (
    AmoebaCloud,
    NumericalError,
    PermutationReport,
    ScalingFit,
    TentacleFit,
    amoeba_sample,
    as_complex_matrix,
    char_poly_coeffs,
    collapse_clusters,
    eigenvalues,
    encircle,
    fit_tentacles,
    roots_aberth,
    scaling_sweep,
)
from .scan import (
    Candidate,
    Classification,
    DegeneracyConditions,
    ScanResult,
    classify,
    degeneracy_conditions,
    eliminate_shift,
    geometric_multiplicity,
    rank_exact,
    scan_parameter,
    solve_candidates,
)

__version__ = "0.1.0"

__all__ = [
    "AmoebaCloud",
    "BuiltinModel",
    "Candidate",
    "Classification",
    "DegeneracyConditions",
    "EPReport",
    "EPSILON",
    "ExactDivisionError",
    "GaussRational",
    "JumpChannel",
    "ModelSpec",
    "MultiPoly",
    "NewtonPoint",
    "NewtonPolygon",
    "NumericalError",
    "OMEGA",
    "OMEGA0",
    "ParseError",
    "PermutationReport",
    "PolyMatrix",
    "ScalingFit",
    "ScanResult",
    "Segment",
    "Superoperator",
    "TentacleDirection",
    "TentacleFit",
    "TropicalFunction",
    "amoeba_sample",
    "as_complex_matrix",
    "assert_routes_agree",
    "build_liouvillian",
    "builtin_model",
    "channel_refill",
    "char_poly",
    "char_poly_coeffs",
    "classify",
    "collapse_clusters",
    "degeneracy_conditions",
    "det_bareiss",
    "det_cofactor",
    "eigenvalues",
    "eliminate_shift",
    "encircle",
    "ep_orders",
    "fit_tentacles",
    "flatten_index",
    "format_poly",
    "gcd_univariate",
    "generic_perturbation",
    "geometric_multiplicity",
    "lower_hull",
    "model_from_dict",
    "newton_points",
    "parse_expression",
    "perturbation_matrix",
    "rank_exact",
    "roots_aberth",
    "scaling_sweep",
    "scan_parameter",
    "solve_candidates",
    "sylvester_resultant",
    "tentacle_directions",
    "tropical_roots",
    "tropicalize",
]
