"""Feynman graphs to GKZ/toric data, convergence classification and eps-expansions."""

from ._accel import HAVE_NUMBA, backend, set_backend
from .continuation import (
    AffineAlpha,
    AmplitudeExpansion,
    LaurentSeries,
    ReductionResult,
    assemble_amplitude_expansion,
    contiguity_step,
    gamma_ratio_series,
    reduce_to_interior,
)
from .errors import (
    DegenerateConfigurationError,
    DivergentInputError,
    EnumerationCapError,
    FeyntopeError,
    GammaSeriesError,
    GraphValidationError,
    LatticeError,
    MissingKinematicsError,
    NotInteriorError,
    QuadratureToleranceError,
    ReductionLimitError,
    ResonanceError,
)
from .graph import (
    Edge,
    GradedPolynomial,
    Graph,
    cuts,
    first_symanzik,
    load_graph,
    loop_number,
    parse_graph,
    q_polynomial,
    spanning_trees,
    two_connected_subgraphs,
)
from .lattice import (
    GkzSystem,
    IntegerRelation,
    LatticeSet,
    amplitude_beta,
    build_point_set,
    gkz_system,
    graph_lattice,
    is_saturated,
    normalized_volume,
    reduce_lattice,
    relation_basis,
)
from .numeric import (
    Estimate,
    KinematicPoint,
    QuadratureConfig,
    i_integral,
    j_integral,
    k_integral,
    k_taylor_coeff,
    momentum_space_amplitude,
)
from .polytope import (
    ConvergenceReport,
    FacetNormal,
    amplitude_pole_report,
    brute_force_facets,
    cone_position,
    facet_normals,
    semi_nonresonant,
)
from .ratfunc import Poly, RationalFunctionEps

__version__ = "0.1.0"
