"""Grid-of-histogram descriptors and likelihood-directed nearest-neighbor search."""

from .image import GrayImage, compute_gradients, median_filter, read_pgm, write_pgm
from .descriptor import (
    DescriptorFormatError,
    GridDescriptor,
    SmoothingKernel,
    build_smoothing_kernel,
    extract_descriptor,
    load_descriptors,
    save_descriptors,
    smooth,
    smooth_descriptors,
    validate_histogram,
)
from .metrics import (
    HTPNN,
    KL,
    GridDistanceEvaluator,
    MetricConfig,
    grid_distance,
    htpnn_distance,
    kl_divergence,
)
from .search import (
    SearchConfig,
    SearchIndex,
    SearchResult,
    brute_force_search,
    build_distance_matrix,
    build_index,
    compute_threshold,
    dem_search,
    load_index,
    make_partitions,
    mldem_search,
    normal_cdf,
    parallel_search,
    permsort_build,
    permsort_search,
    phi,
    save_index,
    search,
    select_first_model,
)
from .synth import SynthSpec, generate_synthetic
from .bench import (
    AsymptoticsReport,
    BenchReport,
    BenchRow,
    run_benchmark,
    sweep_emax,
    sweep_to_csv,
    validate_asymptotics,
)
from .estimators import DirectedEnumerationClassifier, GridHistogramExtractor

__version__ = "0.1.0"

__all__ = [
    "AsymptoticsReport",
    "BenchReport",
    "BenchRow",
    "DescriptorFormatError",
    "DirectedEnumerationClassifier",
    "GrayImage",
    "GridDescriptor",
    "GridDistanceEvaluator",
    "GridHistogramExtractor",
    "HTPNN",
    "KL",
    "MetricConfig",
    "SearchConfig",
    "SearchIndex",
    "SearchResult",
    "SmoothingKernel",
    "SynthSpec",
    "brute_force_search",
    "build_distance_matrix",
    "build_index",
    "build_smoothing_kernel",
    "compute_gradients",
    "compute_threshold",
    "dem_search",
    "extract_descriptor",
    "generate_synthetic",
    "grid_distance",
    "htpnn_distance",
    "kl_divergence",
    "load_descriptors",
    "load_index",
    "make_partitions",
    "median_filter",
    "mldem_search",
    "normal_cdf",
    "parallel_search",
    "permsort_build",
    "permsort_search",
    "phi",
    "read_pgm",
    "run_benchmark",
    "save_descriptors",
    "save_index",
    "search",
    "select_first_model",
    "smooth",
    "smooth_descriptors",
    "sweep_emax",
    "sweep_to_csv",
    "validate_asymptotics",
    "validate_histogram",
    "write_pgm",
]
