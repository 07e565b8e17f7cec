"""Semi-supervised record de-duplication via restricted correlation clustering."""

from .core import (
    Clustering,
    ClusteringClass,
    Dataset,
    HierarchyTree,
    Record,
    canonical_pair,
    count_prunings,
    enumerate_prunings,
    load_dataset,
    load_flat_clustering,
    load_tree,
    pruning_to_clustering,
    same_cluster,
)
from .erm import (
    ErmResult,
    LossEstimate,
    best_pruning,
    best_pruning_exact,
    empirical_neg_error,
    empirical_pos_error,
    erm,
    exact_class_minimum,
    loss_estimate,
    normalized_loss_exact,
    query_budget_bound,
    required_sample_size,
)
from .errors import DedupError
from .metrics import (
    DistanceModel,
    InformativenessReport,
    compute_alpha_beta,
    compute_gamma0,
    informativeness,
    load_distance_matrix,
    mu_from_weights,
)
from .oracle import InteractiveOracle, OracleSession, SimulatedOracle
from .pcc import (
    GadgetParams,
    PccGraph,
    X3cInstance,
    build_gadget,
    correlation_loss,
    decide_x3c,
    gadget_beta,
    load_graph,
    load_x3c,
    save_graph,
    solve_pcc_cliquecover,
    solve_pcc_exhaustive,
)
from .sampling import (
    NeighborIndex,
    PairSample,
    build_neighbor_index,
    collect_sample,
    exact_reference_distribution,
    sample_negative,
    sample_positive,
    tv_distance,
)
from .vcdim import (
    VcReport,
    bell_number,
    class_vc_bound,
    g_flat,
    g_tree,
    max_tree_pairings,
    shatter_check,
)

__version__ = "0.1.0"
