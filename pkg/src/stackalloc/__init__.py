"""Leader-commitment (Stackelberg) solvers for budget allocation over
bipartite influence graphs: exact LP-based equilibria, an MWU
approximation with a certificate, a fictitious-play heuristic, and a
benchmark harness."""

from .bench import (ExperimentRow, ExperimentSpec, parse_spec, parse_specs,
                    run_experiment)
from .exact import (EquilibriumResult, decompose_allocation, enumerate_leader,
                    membership_Q, solve_disjoint_lp, solve_multi_lp)
from .follower import (BestResponseResult, FollowerOracle, best_response,
                       best_response_value, enumerate_follower, follower_oracle)
from .heuristic import greedy_baseline, solve_heuristic
from .lp import LinearProgram, LpOutcome, PivotLimitError, solve_lp
from .model import (BipartiteInfluenceGame, CapExceededError, FractionalAllocation,
                    InstanceFormatError, MixedStrategy, PureStrategy, allocation_of,
                    dump_instance, generate_instance, is_disjoint, load_instance,
                    validate)
from .mwu import (ApproxCertificate, MwuConfig, certify,
                  greedy_weighted_submodular, solve_mwu)
from .payoff import (UtilityPair, activation_prob, activation_vector,
                     follower_utility_pure, leader_utility_pure,
                     mixed_activation_vector, phi, phi_constant, recapture_prob,
                     recapture_vector, utilities_mixed)

__all__ = [
    "ApproxCertificate", "BestResponseResult", "BipartiteInfluenceGame",
    "CapExceededError", "EquilibriumResult", "ExperimentRow", "ExperimentSpec",
    "FollowerOracle", "FractionalAllocation", "InstanceFormatError",
    "LinearProgram", "LpOutcome", "MixedStrategy", "MwuConfig",
    "PivotLimitError", "PureStrategy", "UtilityPair", "activation_prob",
    "activation_vector", "allocation_of", "best_response", "best_response_value",
    "certify", "decompose_allocation", "dump_instance", "enumerate_follower",
    "enumerate_leader", "follower_oracle", "follower_utility_pure",
    "generate_instance", "greedy_baseline", "greedy_weighted_submodular",
    "is_disjoint", "leader_utility_pure", "load_instance",
    "membership_Q", "mixed_activation_vector", "parse_spec", "parse_specs", "phi",
    "phi_constant", "recapture_prob", "recapture_vector", "run_experiment",
    "solve_disjoint_lp", "solve_heuristic", "solve_lp", "solve_multi_lp",
    "solve_mwu", "utilities_mixed", "validate",
]
