"""Certified-style brackets for squeezing functions of plane domains.

Lower bounds come from radii of circular-slit-disk maps, upper bounds
from hyperbolic length estimates of separating loops.  The package
also ships the hierarchy-of-cubes Cantor constructions and the
escape-rate machinery for quadratic Julia sets that exercise those
bounds, plus a CLI (`squeeze`) that writes delimited reports and
matplotlib figures.
"""

from .errors import (
    CertificateError,
    ConfigError,
    DomainError,
    IllConditionedError,
    NoWitnessError,
    ResidualError,
    SolverError,
    SqueezeError,
    TopologyError,
)
from .geometry import (
    ComplementComponent,
    Disk,
    Domain,
    HierarchyCube,
    MobiusMap,
    PointComponent,
    Poly,
    Rect,
    annulus_as_disk_pair,
    component_gap,
    disk_exterior_domain,
    hausdorff_distance,
    lebesgue_measure,
    mobius_apply,
    split_cube,
    two_disk_domain,
    unit_cube,
)
from .hyperbolic import (
    AnnulusModel,
    DiskModel,
    LoopEstimate,
    PuncturedDiskModel,
    circle_loop,
    hyperbolic_length,
    kobayashi_length_upper,
    metric_density,
    poincare_distance_disk,
    squeeze_upper_from_loop,
    sublemma_gap,
    winding_number,
)
from .slitmap import (
    Bracket,
    SlitSolution,
    SolverParams,
    annulus_oracle,
    annulus_oracle_fd,
    r_field,
    r_value,
    slit_squeeze,
    solve_slit_potential,
)

__version__ = "0.1.0"
