"""Lorentzian Ptolemy machinery on exactly computable spaces.

Backends: flat R^{1,n}, constant-curvature 2-D model spaces, Minkowski
cones over metric spaces, and finite causal sets.  On top of them:
Ptolemy slack scans, hyperbolic inversion, synthetic timelike-curvature
comparison (triangles, hinges, four-point condition, sectional
estimates), and a deterministic batch CLI.
"""

from .core import (
    TOL_ABS,
    TOL_REL,
    Event,
    NotTimelikeRelated,
    OracleError,
    OrderError,
    PtolemyVerdict,
    SamplingError,
    ScanReport,
    Separations6,
    Space,
    canonical_json,
    histogram_counts,
    histogram_edges,
    passes_ptolemy,
    ptolemy_slack,
    ptolemy_slack_margin,
    reverse_triangle_deficit,
    slack_scale,
    slack_tolerance,
)
from .minkowski import (
    HyperbolaSpec,
    MinkowskiSpace,
    cayley_menger_volume2,
    classify_equality_case,
    hyperbola_points,
    hyperbolic_angle,
    hyperbolic_norm,
    minkowski_inner,
)
from .modelspaces import (
    Hinge,
    ModelSpace,
    ModelTriangle,
    comparison_point,
    ell_K,
    exp_map,
    f_model,
    law_of_cosines,
    log_map,
    polar_geodesic_oracle,
    radial_map,
    radial_pullback_margin,
    realize_hinge,
    realize_triangle,
    relation_K,
    space_for_chart,
)
from .inversion import (
    InversionSpec,
    InvertedSpace,
    duality_comparison,
    flat_identity_gap,
    inversion_exchange_check,
    inversion_time_sep,
    invert_point,
    inverted_space,
)
from .cone import (
    ConePoint,
    MetricSpaceHandle,
    cone_isometry_residual,
    cone_relation,
    cone_time_sep,
    flat_direction_space,
)
from .curvature import (
    FourPointVerdict,
    SectionalEstimate,
    estimate_sectional,
    flatness_check,
    four_point_check,
    hinge_comparison_check,
    triangle_comparison_min_margin,
)
from .causet import (
    CausalSet,
    causet_from_json,
    causet_from_points,
    causet_to_json,
    exhaustive_ptolemy,
    longest_path_ell,
    sprinkle,
)
from .cli import (
    WitnessConfig,
    report_emit,
    sample_quadruple,
    scan,
    chunk_rng,
    witness_positive_curvature,
)

__version__ = "0.1.0"
