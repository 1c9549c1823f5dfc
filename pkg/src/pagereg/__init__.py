"""Optimal paging and registration policies for Markov mobility models."""

from .belief import BeliefSequence, belief_recursion, delta, phi_update
from .cost import CostReport, CycleStats, TraceStep, export_trace, \
    monte_carlo_cost, policy_cost
from .errors import CapExceeded, NonConvergence, ZeroSurvivalMass
from .iterate import BeliefChain, IterationLog, JointDPResult, \
    individually_optimal, joint_dp, joint_policy_rcls, \
    optimality_certificate, reachable_beliefs
from .major import FiniteDistribution, check_walk_structure, convolve, \
    is_neat, majorizes, min_likelihood_trim, rearrange_nonincreasing
from .model import MotionModel, PagingRCL, RegistrationRCL, build_explicit, \
    build_simple_example, build_symmetric_walk, build_torus, \
    load_model_config, parse_model_config, ping_pong_order, read_rcl, \
    simple_example_policy_pair, stationary_walk_policies, write_rcl
from .paging import aggregate_cells, derive_paging_rcl, guessing_entropy, \
    ml_paging_order, rank_cells
from .regdp import ValueIterationResult, WalkValueResult, \
    extract_registration, fixed_point_residual, value_iteration, \
    walk_value_iteration

__version__ = "0.1.0"
