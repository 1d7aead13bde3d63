"""graphbt: barcode transforms of compact metric graphs.

Exact-rational tooling for extended persistence diagrams of
distance-to-basepoint functions, bottleneck/Wasserstein comparison of their
transforms, injectivity probes, and metric reconstruction.
"""

from .graphs import (
    Edge,
    GraphError,
    GraphPoint,
    Length,
    MetricGraph,
    ValidationReport,
    as_length,
    distance,
    distance_matrix,
    eccentricity,
    injectivity_radius,
    is_circle,
    point_along_geodesic,
    subdivide_at,
    topological_self_loops,
    validate,
)
from .symmetry import (
    SearchSpaceExceeded,
    automorphism_count,
    canonical_tree_code,
    has_small_integer_relation,
)
from .compare import (
    Correspondence,
    DiscreteCoupling,
    correspondence_cost,
    coupling_cost_infinity,
    identity_correspondence,
)
from .persistence import (
    Diagram,
    DiagramPoint,
    HeightField,
    build_height_field,
    diagram_of,
    extended_persistence_reduction,
    extended_persistence_sweep,
    first_nonzero_death,
    recover_graph_from_field,
    valence_from_diagram,
)
from .matching import (
    Matching,
    bottleneck,
    bottleneck_matching,
    diagonal_cost,
    hausdorff_sets,
    point_cost,
    wasserstein_infinity,
)
from .transform import (
    BarcodeSample,
    InjectivityReport,
    MeasuredBarcodeSample,
    PDEstimate,
    ProbeResult,
    TipClassification,
    barcode_transform,
    classify_tip,
    estimate_intrinsic_metric,
    local_isometry_probe,
    measured_persistence_distortion_estimate,
    measured_transform,
    persistence_distortion_estimate,
    sample_basepoints,
    sampled_injectivity_check,
)

__version__ = "0.1.0"
