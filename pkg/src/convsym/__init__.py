"""Symmetry axes, stars of lines and classification checks for convex bodies in E^d."""
from .bodies import (ConvexBody, LpBody, Polytope, Revolution, body_from_dict, make_ball, make_cube,
                     make_ellipsoid, make_k_body_of_revolution, make_lp_body, make_random_polytope,
                     make_symmetric_polytope, minimum_enclosing_ball, section, shadow_boundary)
from .classify import (ClassificationReport, cabezon_condition_check, conjecture_probe,
                       is_k_body_of_revolution, theorem_brasil_pipeline, theorem_copaoro_pipeline,
                       theorem_dream_pipeline, theorem_fantasia_pipeline, theorem_grandota_pipeline)
from .geometry import Flat, Isometry, affine_hull, axis_involution, rotation_about_coaxis
from .metrics import busemann_distance, flat_sequence_limit, hausdorff
from .star import Star, build_star, classify_star, star_from_angle
from .symmetry import (SymmetryClaim, detect_axes, is_axis_of_symmetry, is_hyperplane_of_symmetry,
                       is_k_axis_of_symmetry, is_n_axis_of_symmetry, is_rotation_coaxis_of_order,
                       orthogonal_symmetry_lines)
from .tolerance import DEFAULT_TOL, Tolerance

__version__ = "0.1.0"

__all__ = [
    "ConvexBody", "LpBody", "Polytope", "Revolution", "body_from_dict", "make_ball", "make_cube",
    "make_ellipsoid", "make_k_body_of_revolution", "make_lp_body", "make_random_polytope",
    "make_symmetric_polytope", "minimum_enclosing_ball", "section", "shadow_boundary",
    "ClassificationReport", "cabezon_condition_check", "conjecture_probe", "is_k_body_of_revolution",
    "theorem_brasil_pipeline", "theorem_copaoro_pipeline", "theorem_dream_pipeline",
    "theorem_fantasia_pipeline", "theorem_grandota_pipeline", "Flat", "Isometry", "affine_hull",
    "axis_involution", "rotation_about_coaxis", "busemann_distance", "flat_sequence_limit",
    "hausdorff", "Star", "build_star", "classify_star", "star_from_angle", "SymmetryClaim",
    "detect_axes", "is_axis_of_symmetry", "is_hyperplane_of_symmetry", "is_k_axis_of_symmetry",
    "is_n_axis_of_symmetry", "is_rotation_coaxis_of_order", "orthogonal_symmetry_lines",
    "DEFAULT_TOL", "Tolerance",
]
