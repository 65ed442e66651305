"""Sharp spherical-derivative bounds for locally univalent meromorphic
functions on the unit disk, with numerical verification tools."""

from .errors import ConvergenceError, CriticalPointError, InfeasibleLevelError
from .sphere import (
    INFINITY,
    DiskAutomorphism,
    RigidMotion,
    SpherePoint,
    apply_disk_auto,
    apply_rigid,
    chordal_distance,
    compose_rigid,
    hyperbolic_density,
    invert_rigid,
    spherical_density,
)
from .functions import (
    BlaschkeProduct,
    MeroFunction,
    RationalFunction,
    RigidScaled,
    eval_bundle,
    evaluate,
    parse_descriptor,
    probe_local_univalence,
    schwarzian,
    spherical_derivative,
)
from .grids import GridSpec
from .bounds import (
    BoundQuery,
    BoundReport,
    asymptotic_factor,
    feasible_radius_bound,
    length_preserving_level,
    origin_lower,
    origin_upper,
    pointwise_bounds,
)
from .membership import (
    ExtremalSpec,
    MembershipReport,
    gn_counterexample,
    make_extremal,
    probe_membership,
    verify_sharpness,
)
from .liouville import BvpProblem, closed_form_solutions, count_solutions, shoot, verify_rigidity
from .schwarz_pick import (
    ConstrainedSelfMap,
    construct_extremal_automorphism,
    extremal_map,
    sample_constrained_maps,
    sp_bound,
)
from .ode_pair import OdeSolutionPair, integrate_pair, spherical_via_pair, thm3_pipeline
from .rational_normality import PolePrescription, bernstein_factor, kn, norm_bound, sup_norm

__version__ = "0.1.0"
