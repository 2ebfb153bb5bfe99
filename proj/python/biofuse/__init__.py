"""Face and fingerprint point-set fusion."""

from ._core import (
    BiofuseError,
    FeaturePoint,
    Modality,
    Template,
    TemplateKind,
    __version__,
    accuracy,
    concatenate,
    delaunay_match,
    delaunay_triangulate,
    descriptor_distance,
    direction_distance,
    kmeans_reduce,
    neighborhood_eliminate,
    point_pattern_match,
    run_cli,
    spatial_distance,
    trial_counts,
)

__all__ = [
    "BiofuseError",
    "FeaturePoint",
    "Modality",
    "Template",
    "TemplateKind",
    "__version__",
    "accuracy",
    "concatenate",
    "delaunay_match",
    "delaunay_triangulate",
    "descriptor_distance",
    "direction_distance",
    "kmeans_reduce",
    "neighborhood_eliminate",
    "point_pattern_match",
    "run_cli",
    "spatial_distance",
    "trial_counts",
]
