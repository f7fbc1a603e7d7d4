"""Warped product immersions into space forms: curvature, fundamental forms and type classification."""

__version__ = "0.1.0"

from .ambient import AmbientSpace, SphericalSub, WarpedRep, inner, project_tangent, psi, sigma
from .classify import BTypeData, PointType, Tag, classify_point, extract_b_data, verify_pointwise_relations
from .immersion import Immersion, gauss_residual, sample, second_ff
from .warped import BlockDomain, FactorChart, Grid, WarpedDomain, curvature_warped, riemann_tensor

__all__ = [
    "AmbientSpace", "SphericalSub", "WarpedRep", "inner", "project_tangent", "psi", "sigma",
    "BTypeData", "PointType", "Tag", "classify_point", "extract_b_data", "verify_pointwise_relations",
    "Immersion", "gauss_residual", "sample", "second_ff",
    "BlockDomain", "FactorChart", "Grid", "WarpedDomain", "curvature_warped", "riemann_tensor",
]
