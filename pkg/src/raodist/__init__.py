"""Fisher-Rao distances, Fisher matrices and geodesics for parametric families.

>>> import raodist as rd
>>> p = rd.point("gaussian", [2, 0.5])
>>> q = rd.point("gaussian", [5, 1])
>>> round(rd.distance(p, q), 4)
3.4432
"""

from .errors import (
    DegenerateError,
    DimensionError,
    DomainError,
    MismatchError,
    NonConvergenceError,
    NotOnSphereError,
    QuadratureError,
    RaoDistError,
    SupportError,
    UnknownFamilyError,
    UnknownGeneratorError,
    UnsupportedError,
)
from .core import (
    CONSTANTS,
    EULER_GAMMA,
    ChartMap,
    Constants,
    FamilyDescriptor,
    ParamPoint,
    distance,
    family_names,
    fisher,
    geodesic_array,
    geodesic_path,
    get_family,
    halfplane_chart,
    log_density,
    normalise_name,
    point,
    sample_point,
    validate_params,
)
from . import discrete, continuous, elliptical, matrix  # noqa: F401  (registers families)
from .hyperbolic import (
    HalfPlanePoint,
    ScaledMetricSpec,
    central_projection,
    halfplane_distance,
    halfspace_distance,
    hemisphere_distance,
    inverse_central_projection,
    scaled_geodesic,
    scaled_geodesic_point,
    scaled_halfplane_distance,
)
from .discrete import (
    bhattacharyya_coefficient,
    categorical_sphere_distance,
    hellinger_distance,
    simplex_sphere_embedding,
)
from .elliptical import (
    EllipticalGenerator,
    elliptical_constants,
    elliptical_constants_numeric,
    elliptical_distance,
    elliptical_fisher,
    generator,
    make_generator,
)
from .matrix import (
    duplication_matrix,
    spd_geodesic,
    spd_geodesic_eigenvalues,
    unvech,
    vech,
    wishart_distance,
    wishart_fisher,
)
from .product import ProductPoint, product_distance, product_fisher

__version__ = "0.1.0"
