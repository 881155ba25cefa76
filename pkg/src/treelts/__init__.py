"""Reduction and reachability checking for tree networks of reset-on-sync
labelled transition systems."""

from .checker import Entry, Formula, Verdict, check, check_ef, check_eg, lift_witness
from .errors import (
    EmptyProjection,
    EmptyReduction,
    InvalidWitness,
    NotATree,
    NotTwoLevel,
    OracleTooLarge,
    ParseError,
    StateLimitExceeded,
    TreeLtsError,
    UnknownRoot,
    ValidationError,
)
from .harness import (
    GenConfig,
    StatsReport,
    SuiteReport,
    equivalence_suite,
    gen_random_tree,
    stats,
)
from .model import (
    DEFAULT_SILENT,
    Component,
    Network,
    Violation,
    acts_of,
    infer_topology,
    subnetwork,
    two_level_network,
    validate_live_reset,
)
from .product import (
    ExplicitLts,
    FreshInit,
    GlobalTuple,
    Path,
    PathPrefix,
    SquareOrigin,
    Transition,
    component_lts,
    full_product,
    pair_product,
    prefix_from_states,
    prefix_of,
    product_of,
    project_prefix,
    replay,
    resolve_prefix,
)
from .reduction import (
    ReductionStage,
    SumOfSquares,
    build_sq,
    build_sq_unreduced,
    cmpl,
    compute_locked,
    prune_locked,
    reduce_net,
    reduce_net_traced,
)

__version__ = "0.1.0"

__all__ = [
    "Component",
    "DEFAULT_SILENT",
    "EmptyProjection",
    "EmptyReduction",
    "Entry",
    "ExplicitLts",
    "Formula",
    "FreshInit",
    "GenConfig",
    "GlobalTuple",
    "InvalidWitness",
    "Network",
    "NotATree",
    "NotTwoLevel",
    "OracleTooLarge",
    "ParseError",
    "Path",
    "PathPrefix",
    "ReductionStage",
    "SquareOrigin",
    "StateLimitExceeded",
    "StatsReport",
    "SuiteReport",
    "SumOfSquares",
    "Transition",
    "TreeLtsError",
    "UnknownRoot",
    "ValidationError",
    "Verdict",
    "Violation",
    "acts_of",
    "build_sq",
    "build_sq_unreduced",
    "check",
    "check_ef",
    "check_eg",
    "cmpl",
    "component_lts",
    "compute_locked",
    "equivalence_suite",
    "full_product",
    "gen_random_tree",
    "infer_topology",
    "lift_witness",
    "pair_product",
    "prefix_from_states",
    "prefix_of",
    "product_of",
    "project_prefix",
    "prune_locked",
    "reduce_net",
    "reduce_net_traced",
    "replay",
    "resolve_prefix",
    "stats",
    "subnetwork",
    "two_level_network",
    "validate_live_reset",
]
