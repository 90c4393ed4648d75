"""Dynamical sampling for convolution operators on finite abelian groups."""

from __future__ import annotations

from .constructors import (
    ConstructionError,
    ConstructionRecipe,
    PeriodicPlan2D,
    consecutive_set,
    gcd_pair_set,
    periodic_W_set,
    prime_any_set,
    prime_power_uniform_set,
    search_minimal,
    sym2d_periodic_set,
    sym2d_set,
)
from .frames import (
    FRAME,
    NEVER_FRAME,
    NOT_FRAME,
    FrameReport,
    PeriodicPlan,
    SamplingPlan,
    analysis_matrix,
    bind,
    frame_test_direct,
    frame_test_projection,
    min_period_bound,
    min_sensor_bound,
    never_frame_test,
    periodic_frame_test,
    smallest_uniform_depth,
)
from .groups import FiniteGroup, fourier_matrix, make_group, numerical_rank, submatrix
from .recon import ReconstructionResult, SampleRecord, reconstruct, simulate_samples, subsample
from .spark import (
    RowSelection,
    SparkCapExceeded,
    annihilator_subgroup,
    find_singular_witness,
    is_full_spark,
    is_full_spark_rows,
    is_uniformly_distributed,
    spark,
    spark_witness,
    transform_rows,
)
from .spectral import (
    Kernel,
    LevelPartition,
    PartitionAmbiguityWarning,
    annihilator_degree,
    annihilator_degrees,
    apply_operator,
    eigenprojections,
    kernel_from_partition,
    kernel_from_space,
    kernel_from_symbol,
    level_partition,
    random_partition,
    random_slice_partition,
)
from .symmetry2d import SymmetryClass, orbits, random_symmetric_kernel

__version__ = "0.1.0"

__all__ = [
    "ConstructionError",
    "ConstructionRecipe",
    "FRAME",
    "FiniteGroup",
    "FrameReport",
    "Kernel",
    "LevelPartition",
    "NEVER_FRAME",
    "NOT_FRAME",
    "PartitionAmbiguityWarning",
    "PeriodicPlan",
    "PeriodicPlan2D",
    "ReconstructionResult",
    "RowSelection",
    "SampleRecord",
    "SamplingPlan",
    "SparkCapExceeded",
    "SymmetryClass",
    "analysis_matrix",
    "annihilator_degree",
    "annihilator_degrees",
    "annihilator_subgroup",
    "apply_operator",
    "bind",
    "consecutive_set",
    "eigenprojections",
    "find_singular_witness",
    "fourier_matrix",
    "frame_test_direct",
    "frame_test_projection",
    "gcd_pair_set",
    "is_full_spark",
    "is_full_spark_rows",
    "is_uniformly_distributed",
    "kernel_from_partition",
    "kernel_from_space",
    "kernel_from_symbol",
    "level_partition",
    "make_group",
    "min_period_bound",
    "min_sensor_bound",
    "never_frame_test",
    "numerical_rank",
    "orbits",
    "periodic_W_set",
    "periodic_frame_test",
    "prime_any_set",
    "prime_power_uniform_set",
    "random_partition",
    "random_slice_partition",
    "random_symmetric_kernel",
    "reconstruct",
    "search_minimal",
    "simulate_samples",
    "smallest_uniform_depth",
    "spark",
    "spark_witness",
    "submatrix",
    "subsample",
    "sym2d_periodic_set",
    "sym2d_set",
    "transform_rows",
]
