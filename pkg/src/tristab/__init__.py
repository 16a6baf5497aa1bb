"""Normal stability of triharmonic hypersurfaces in space forms.

Exact spectral index computations for the small hypersphere and the
generalized Clifford torus, plus a discrete variational oracle for curves
in the round 2-sphere.
"""

__version__ = "0.1.0"

from .errors import (
    DimensionError,
    DomainError,
    NotApplicableError,
    RangeError,
    TristabError,
)
from .spaceform import HypersurfaceData, SpaceForm, curvature_operator, tension_of_immersion
from .cubic import CubicPoly
from .spectrum import (
    ProductSource,
    SphereSource,
    Spectrum,
    SpectrumLevel,
    product_spectrum,
    sphere_level,
    spectrum_up_to,
)
from .catalog import (
    CliffordRoots,
    CliffordTorus,
    check_triharmonicity,
    clifford_geometry,
    clifford_polynomial,
    clifford_torus,
    small_triharmonic_hypersphere,
    solve_clifford_radii,
)
from .stability import (
    HessianDensity,
    IndexReport,
    bound_poly_from_estimate,
    clifford_index_bound,
    evaluate_form,
    hessian_density_terms,
    small_sphere_form_poly,
    small_sphere_normal_index,
    umbilic_hessian_poly,
)
