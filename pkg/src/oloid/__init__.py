"""Mass properties of the oloid by four independent routes.

* :mod:`oloid.elliptic` -- closed forms through complete elliptic integrals;
* :mod:`oloid.quadrature` -- surface-flux quadrature of the parametric hull;
* :mod:`oloid.montecarlo` -- rejection sampling with exact membership tests;
* :mod:`oloid.mesh` -- polyhedral integration over a watertight triangulation.
"""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    ContractError,
    DomainError,
    EvaluationError,
    MassProperties,
    Method,
    OloidError,
    OloidSpec,
    SingularityError,
    TessellationError,
)
from .elliptic import agm, closed_form_properties, ellint_E, ellint_K  # noqa: E402
from .mesh import MeshConfig, TriangleMesh, export_mesh, mesh_mass_properties, tessellate  # noqa: E402
from .montecarlo import McConfig, contains, mc_mass_properties, sample_inside, support_function  # noqa: E402
from .quadrature import QuadratureConfig, de_integrate, flux_integral, quadrature_mass_properties  # noqa: E402
from .surface import Sheet, position, surface_normal, tangents  # noqa: E402

__all__ = [
    "ContractError", "DomainError", "EvaluationError", "MassProperties", "Method",
    "OloidError", "OloidSpec", "SingularityError", "TessellationError",
    "agm", "closed_form_properties", "ellint_E", "ellint_K",
    "MeshConfig", "TriangleMesh", "export_mesh", "mesh_mass_properties", "tessellate",
    "McConfig", "contains", "mc_mass_properties", "sample_inside", "support_function",
    "QuadratureConfig", "de_integrate", "flux_integral", "quadrature_mass_properties",
    "Sheet", "position", "surface_normal", "tangents",
]
