"""Cone geometry, Fourier-Laplace transforms of cone-supported densities, and numerical checks of their bounds."""

__version__ = "0.1.0"

from .cones import (  # noqa: E402
    CrossSection,
    PolyhedralCone,
    VladimirovConstant,
    contains_point,
    cross_section,
    dual_cone,
    is_compact_subcone,
    vladimirov_constant,
)
from .distributions import (  # noqa: E402
    BoundedDensity,
    ExpGrowthDistribution,
    catalog,
    density_eval,
    density_sup_bound,
    pointwise_decay_bound,
)
from .indicators import (  # noqa: E402
    CompactConvexSet,
    in_C_K,
    indicator_compact,
    indicator_cone_normalized,
    mixed_indicator,
)
from .pws import (  # noqa: E402
    RecoveredDensity,
    WindowSpec,
    parseval_check,
    recover_density,
    roundtrip_reconstruct,
    select_gamma,
    y_independence_check,
)
from .reports import BoundReport  # noqa: E402
from .transform import (  # noqa: E402
    FourierLaplace,
    QuadratureSpec,
    TubeDomain,
    TubePoint,
    growth_bound_check,
    holomorphy_check,
    l2_bound_check,
    laplace_derivative,
    laplace_transform,
    tube_seminorm,
)
from .wavefront import (  # noqa: E402
    BoundarySignal,
    WaveFrontEstimate,
    boundary_value,
    cone_containment_check,
    fbi_decay_profile,
    wavefront_estimate,
)

__all__ = [
    "boundary_value",
    "BoundarySignal",
    "BoundedDensity",
    "BoundReport",
    "catalog",
    "CompactConvexSet",
    "cone_containment_check",
    "contains_point",
    "cross_section",
    "CrossSection",
    "density_eval",
    "density_sup_bound",
    "dual_cone",
    "ExpGrowthDistribution",
    "fbi_decay_profile",
    "FourierLaplace",
    "growth_bound_check",
    "holomorphy_check",
    "in_C_K",
    "indicator_compact",
    "indicator_cone_normalized",
    "is_compact_subcone",
    "l2_bound_check",
    "laplace_derivative",
    "laplace_transform",
    "mixed_indicator",
    "parseval_check",
    "pointwise_decay_bound",
    "PolyhedralCone",
    "QuadratureSpec",
    "recover_density",
    "RecoveredDensity",
    "roundtrip_reconstruct",
    "select_gamma",
    "tube_seminorm",
    "TubeDomain",
    "TubePoint",
    "vladimirov_constant",
    "VladimirovConstant",
    "wavefront_estimate",
    "WaveFrontEstimate",
    "WindowSpec",
    "y_independence_check",
]
