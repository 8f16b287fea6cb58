"""Error-correcting regenerating and locally repairable storage codes.

A Gabidulin (rank-metric) outer code is concatenated with an F_q array code,
so that errors injected by compromised storage nodes stay low-rank however
often they propagate through repairs.
"""

from .errors import (
    DecodeFailure,
    FieldMismatch,
    GroupUnrepairable,
    InconsistentSystem,
    InfeasibleAdversary,
    InsufficientNodes,
    InvalidPoints,
    MalformedInput,
    RankStoreError,
    RepairFailure,
    ScenarioError,
    SingularMatrix,
)
from .field import ExtElem, ExtField, PrimeField, canonical_modulus, expand_vector, ext_field_create, rank_q
from .linearized import LinearizedPolynomial, left_divide, lin_eval, min_subspace_poly
from .gabidulin import GabidulinCode, gab_decode, gab_decode_subset, gab_encode, gab_points_default
from .arraycode import ArrayCode, RepairPlan, RepairScheme, mds_array_rowwise, msr_repair, zigzag_5_3
from .constructions import (
    ConstructionOne,
    ConstructionTwo,
    NodeView,
    build_construction_one,
    build_construction_two,
    c2_msr_variant,
    transform_eval_points,
)
from .simulator import (
    AdversaryModel,
    DynamicStrategy,
    SystemState,
    aggregate_error_rank,
    sim_collect,
    sim_corrupt,
    sim_fail_repair,
    sim_init,
    verifier_check,
)

__version__ = "0.1.0"
