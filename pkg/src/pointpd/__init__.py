"""Persistence diagrams of small point clouds, an edge taxonomy that
explains which distances can appear in them, and constructions (tails,
long wedges) that grow clouds without changing their degree-1 diagrams.
"""

from .cloudfile import CloudFormatError, parse_cloud, read_cloud, write_cloud
from .constructions import (
    AttachReport,
    HypothesisError,
    TailCheck,
    TailSpec,
    TailTheoremReport,
    WedgeReport,
    attach_tail,
    distance_multiset,
    generate_tail,
    generate_trivial_family,
    validate_tail,
    verify_long_wedge,
    verify_tail_theorem,
)
from .edges import (
    ConsistencyError,
    EdgeClass,
    classify_all,
    classify_edge,
    long_by_cech,
    long_by_delaunay,
    long_by_vr,
)
from .experiments import (
    ExperimentConfig,
    HistogramResult,
    SweepResult,
    derive_rng,
    gap_ratio_sweep,
    persistence_histogram,
    sample_uniform_cube,
)
from .filtration import (
    FilteredComplex,
    FilteredSimplex,
    FiltrationKind,
    build_cech,
    build_complex,
    build_delaunay_2d,
    build_vr,
    critical_scales,
)
from .geometry import (
    PointCloud,
    Ray,
    angular_deviation,
    angular_thickness,
    enclosing_radius_3,
    min_ray_angle,
    oriented_angle,
    segment_angle,
)
from .persistence import (
    GapStats,
    PersistenceDiagram,
    bottleneck_distance,
    compute_pd,
    diagram_equal,
    diagrams_from_csv,
    diagrams_to_csv,
    gap_stats,
    mst,
)

__version__ = "0.1.0"

__all__ = [
    "AttachReport",
    "CloudFormatError",
    "ConsistencyError",
    "EdgeClass",
    "ExperimentConfig",
    "FilteredComplex",
    "FilteredSimplex",
    "FiltrationKind",
    "GapStats",
    "HistogramResult",
    "HypothesisError",
    "PersistenceDiagram",
    "PointCloud",
    "Ray",
    "SweepResult",
    "TailCheck",
    "TailSpec",
    "TailTheoremReport",
    "WedgeReport",
    "attach_tail",
    "bottleneck_distance",
    "build_cech",
    "build_complex",
    "build_delaunay_2d",
    "build_vr",
    "classify_all",
    "classify_edge",
    "compute_pd",
    "critical_scales",
    "derive_rng",
    "diagram_equal",
    "diagrams_from_csv",
    "diagrams_to_csv",
    "distance_multiset",
    "enclosing_radius_3",
    "gap_ratio_sweep",
    "gap_stats",
    "generate_tail",
    "generate_trivial_family",
    "long_by_cech",
    "long_by_delaunay",
    "long_by_vr",
    "min_ray_angle",
    "mst",
    "oriented_angle",
    "parse_cloud",
    "persistence_histogram",
    "read_cloud",
    "sample_uniform_cube",
    "segment_angle",
    "validate_tail",
    "verify_long_wedge",
    "verify_tail_theorem",
    "write_cloud",
]
