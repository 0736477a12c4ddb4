"""Invariants of closed curves on the sphere and in space.

Counts inflections, vertices, singular points, double points, and
antipodal / parallel-tangent pairs of sampled curves; runs curve
shortening flow on the sphere with monotonicity instrumentation; performs
the desingularization and double-point surgeries with their combined-count
contract; and checks the sharp lower bounds on constructed examples and
seeded random corpora.
"""

from .errors import TantrixError
from .geom import (
    SampledCurve,
    ScalarField,
    Tolerances,
    beltrami_project,
    beltrami_unproject,
    differentiate,
    gauss_bonnet_residual,
    resample_arclength,
    stereographic_project,
    stereographic_unproject,
)
from .invariants import (
    DEGENERATE,
    INFINITE,
    CountResult,
    FrenetData,
    InvariantReport,
    count_sign_changes,
    frenet,
    geodesic_curvature,
    invariant_report,
    tantrix,
)
from .incidence import (
    AreaResult,
    HullStatus,
    PairSet,
    coincidence_pairs,
    enclosed_area,
    hemisphere_pole,
    origin_in_hull,
    parallel_tangent_pairs,
)
from .flow import (
    FlowState,
    FlowTrajectory,
    csf_run,
    csf_step,
    flow_state,
    monotonicity_report,
)
from .surgery import (
    DoubleSpiral,
    GraphArc,
    SurgeryOutcome,
    bump_perturb,
    classify_double_spiral,
    desingularize,
    mollify_zero_preserving,
    resolve_double_point,
)
from .synthesis import (
    ArcAssembly,
    FourierLoop,
    close_up,
    curve_from_geodesic_curvature,
    default_variant,
    integrate_tantrix,
    random_fourier_loop,
    sharp_example,
    sharp_triples,
)
from .verify import (
    Verdict,
    antipodal_symmetry_residual,
    darboux_report,
    inscribed_bound_check,
    verify_projective,
    verify_space,
    verify_spherical,
)
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "TantrixError",
    "SampledCurve",
    "ScalarField",
    "Tolerances",
    "beltrami_project",
    "beltrami_unproject",
    "differentiate",
    "gauss_bonnet_residual",
    "resample_arclength",
    "stereographic_project",
    "stereographic_unproject",
    "DEGENERATE",
    "INFINITE",
    "CountResult",
    "FrenetData",
    "InvariantReport",
    "count_sign_changes",
    "frenet",
    "geodesic_curvature",
    "invariant_report",
    "tantrix",
    "AreaResult",
    "HullStatus",
    "PairSet",
    "coincidence_pairs",
    "enclosed_area",
    "hemisphere_pole",
    "origin_in_hull",
    "parallel_tangent_pairs",
    "FlowState",
    "FlowTrajectory",
    "csf_run",
    "csf_step",
    "flow_state",
    "monotonicity_report",
    "DoubleSpiral",
    "GraphArc",
    "SurgeryOutcome",
    "bump_perturb",
    "classify_double_spiral",
    "desingularize",
    "mollify_zero_preserving",
    "resolve_double_point",
    "ArcAssembly",
    "FourierLoop",
    "close_up",
    "curve_from_geodesic_curvature",
    "default_variant",
    "integrate_tantrix",
    "random_fourier_loop",
    "sharp_example",
    "sharp_triples",
    "Verdict",
    "antipodal_symmetry_residual",
    "darboux_report",
    "inscribed_bound_check",
    "verify_projective",
    "verify_space",
    "verify_spherical",
    "BACKEND",
    "__version__",
]
