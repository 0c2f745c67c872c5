"""GT-Bezier curves and multisided surfaces with toric degenerations."""
from .basis import (ScaleParams, eval_basis_1d, eval_basis_2d, eval_rational_basis_1d,
                    eval_rational_basis_2d, toric_coordinates)
from .coefficients import (check_strict_total_positivity, collocation_matrix, iter_minors,
                           solve_partition_coefficients)
from .curve import (GTBezierCurve, Polyline, count_line_crossings_curve, count_line_crossings_polygon,
                    distance_to_curve, endpoint_tangents, eval_curve, is_convex_polyline, merge_knots,
                    pia_fit, sample_curve, sample_curve_image, weight_infinity_limit)
from .degeneration import (Lifting, RegularDecomposition, degenerate, degeneration_sequence,
                           find_lifting, hausdorff_distance, regular_control_curve,
                           regular_control_surface, regular_decomposition_1d,
                           regular_decomposition_2d, weight_family)
from .errors import (ConvergenceError, DegenerateError, DomainError, GTBezierError,
                     NonPositiveCoefficientsWarning, NormalizationFallbackWarning,
                     PreconditionError, SingularityError, SizeError, SolverError)
from .geometry import (EdgeLine, Interval, KnotSet1D, KnotSet2D, PolygonHull, contains,
                       convex_hull_2d, edge_lines, knot_exponents, pow_conv)
from .surface import (GTBezierSurface, SampledMesh, boundary_curve, corner_values, eval_surface,
                      isoparametric_polyline, merge_knots_surface, sample_surface,
                      sample_surface_image)

__all__ = [
    "ScaleParams", "eval_basis_1d", "eval_basis_2d", "eval_rational_basis_1d",
    "eval_rational_basis_2d", "toric_coordinates", "check_strict_total_positivity",
    "collocation_matrix", "iter_minors", "solve_partition_coefficients", "GTBezierCurve",
    "Polyline", "count_line_crossings_curve", "count_line_crossings_polygon",
    "distance_to_curve", "endpoint_tangents", "eval_curve", "is_convex_polyline", "merge_knots",
    "pia_fit", "sample_curve", "sample_curve_image", "weight_infinity_limit", "Lifting",
    "RegularDecomposition", "degenerate", "degeneration_sequence", "find_lifting",
    "hausdorff_distance", "regular_control_curve", "regular_control_surface",
    "regular_decomposition_1d", "regular_decomposition_2d", "weight_family", "ConvergenceError",
    "DegenerateError", "DomainError", "GTBezierError", "NonPositiveCoefficientsWarning",
    "NormalizationFallbackWarning", "PreconditionError", "SingularityError", "SizeError",
    "SolverError", "EdgeLine", "Interval", "KnotSet1D", "KnotSet2D", "PolygonHull", "contains",
    "convex_hull_2d", "edge_lines", "knot_exponents", "pow_conv", "GTBezierSurface",
    "SampledMesh", "boundary_curve", "corner_values", "eval_surface", "isoparametric_polyline",
    "merge_knots_surface", "sample_surface", "sample_surface_image",
]

__version__ = "0.1.0"
