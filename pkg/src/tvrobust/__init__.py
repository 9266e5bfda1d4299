"""Robustness analysis for discrete Bayesian networks in total variation.

The library measures how far conditional probability tables can move a
network's margins: table diameters, propagation and perturbation
bounds, clique-path impact products, and the costs of structural
simplifications (edge deletion, level amalgamation), all checkable
against a brute-force exact-inference oracle on small networks.
"""

from .bn_model import (
    BayesNet,
    Variable,
    ancestral_set,
    descendants_map,
    topological_order,
    validate,
)
from .bounds import (
    BoundResult,
    Factor,
    OverlapDecomposition,
    chain_diameter_bound,
    diameter_sum_bound,
    joint_perturb_bound,
    joint_tv_bound,
    overlap_decompose,
    path_impact,
    propagate_bound,
)
from .advisors import (
    EdgeRecord,
    EdgeReport,
    PriorityRecord,
    amalgamate_levels,
    amalgamation_suggest,
    delete_edge,
    edge_deletion_report,
    elicitation_priority,
)
from .cli_io import (
    emit_dot,
    model_document,
    parse_model,
    run_cli,
    serialize_model,
)
from .errors import DomainError, ParseError, ResourceLimitError
from .exact_oracle import (
    JointTable,
    conditional_table,
    joint_mass,
    marginal,
    marginal_of,
    state_limit,
    table_tv,
    transition_table,
)
from .jtree import (
    CliquePath,
    JunctionTree,
    UGraph,
    ancestral_graph,
    build_junction_tree,
    donor_target_path,
    donor_target_reduction,
    is_chordal,
    junction_property_holds,
    maximal_cliques,
    moralize,
    path_factor_specs,
    path_tables,
    simple_path,
    triangulate,
    verify_running_intersection,
)
from .tv_core import (
    Cpt,
    ProbVec,
    VariationMatrix,
    collapse_parent,
    cpt_superbound,
    cpt_tv_plus,
    diameter,
    diameter_witness,
    local_diameter,
    mix,
    parent_diameter,
    parent_index,
    superbound_witness,
    tv_distance,
    variation_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "BayesNet",
    "BoundResult",
    "CliquePath",
    "Cpt",
    "DomainError",
    "EdgeRecord",
    "EdgeReport",
    "Factor",
    "JointTable",
    "JunctionTree",
    "OverlapDecomposition",
    "ParseError",
    "PriorityRecord",
    "ProbVec",
    "ResourceLimitError",
    "UGraph",
    "Variable",
    "VariationMatrix",
    "amalgamate_levels",
    "amalgamation_suggest",
    "ancestral_graph",
    "ancestral_set",
    "build_junction_tree",
    "chain_diameter_bound",
    "collapse_parent",
    "conditional_table",
    "cpt_superbound",
    "cpt_tv_plus",
    "delete_edge",
    "descendants_map",
    "diameter",
    "diameter_sum_bound",
    "diameter_witness",
    "donor_target_path",
    "donor_target_reduction",
    "edge_deletion_report",
    "elicitation_priority",
    "emit_dot",
    "is_chordal",
    "joint_mass",
    "joint_perturb_bound",
    "joint_tv_bound",
    "junction_property_holds",
    "local_diameter",
    "marginal",
    "marginal_of",
    "maximal_cliques",
    "mix",
    "model_document",
    "moralize",
    "overlap_decompose",
    "parent_diameter",
    "parent_index",
    "parse_model",
    "path_factor_specs",
    "path_impact",
    "path_tables",
    "propagate_bound",
    "run_cli",
    "serialize_model",
    "simple_path",
    "state_limit",
    "superbound_witness",
    "table_tv",
    "topological_order",
    "transition_table",
    "triangulate",
    "tv_distance",
    "validate",
    "variation_matrix",
    "verify_running_intersection",
]
