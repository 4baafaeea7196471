"""Triangulated closed surfaces, boundary matrices, and exact invariants."""

from .rank import exact_rank
from .complexes import (
    Component,
    GenerationError,
    ParameterError,
    TriangulatedSurface,
    disjoint_union,
    generate_surface,
    validate_surface,
)
from .boundary import BoundaryMatrices, boundary_matrices
from .datapoints import (
    Datapoint,
    DATASET_CLASSES,
    InternalConsistencyError,
    build_dataset,
    count_components,
    dataset_records,
    feature_matrix,
    make_datapoint,
    read_dataset,
    write_dataset,
)

__all__ = [
    "BoundaryMatrices",
    "Component",
    "DATASET_CLASSES",
    "Datapoint",
    "GenerationError",
    "InternalConsistencyError",
    "ParameterError",
    "TriangulatedSurface",
    "boundary_matrices",
    "build_dataset",
    "count_components",
    "dataset_records",
    "disjoint_union",
    "exact_rank",
    "feature_matrix",
    "generate_surface",
    "make_datapoint",
    "read_dataset",
    "validate_surface",
    "write_dataset",
]
