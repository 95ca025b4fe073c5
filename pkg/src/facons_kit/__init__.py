"""facons-kit: asymptotic sets of dominant polynomial maps C^n -> C^n.

Exact computation of the non-properness locus via coordinate
eliminants, classification of escape-to-infinity curve families
(facons), the star-facon stratification with its frontier poset, and
sampled verification of Thom-Mather tubular-neighborhood data.
"""

from .asymptotic import AsymptoticSet, asymptotic_set, check_dominant, fiber_nonempty
from .facons import Facon, PQUple, classify_coordinates, limit_constraints
from .parser import ParseError, parse_map
from .poly import Polynomial, PolynomialMap, jacobian_determinant
from .strata import Stratification, Stratum, check_frontier, star_stratify
from .tubes import Ray, blend_rays, curvilinear_distance, project_pi, solve_ray

__version__ = "0.1.0"

__all__ = [
    "AsymptoticSet", "Facon", "ParseError", "PQUple", "Polynomial",
    "PolynomialMap", "Ray", "Stratification", "Stratum", "asymptotic_set",
    "blend_rays", "check_dominant", "check_frontier", "classify_coordinates",
    "curvilinear_distance", "fiber_nonempty", "jacobian_determinant",
    "limit_constraints", "parse_map", "project_pi", "solve_ray",
    "star_stratify", "__version__",
]
