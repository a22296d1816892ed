"""Optimal and approximately optimal dynamic mechanisms for selling one item per period."""

from .approx import (ApproxPolicy, backward_pass_h, best_constant_allocation, execute2, expected_revenue2,
                     mechanism1_revenue, plan_approx, upper_bound)
from .dist import (DiscreteDistribution, equal_revenue_discrete, expected_value, monopoly, price_curves,
                   virtual_value)
from .dyn import (ExecutionTrace, OptimalPolicy, backward_pass, execute, expected_revenue, plan,
                  stage_mechanism, verify)
from .errors import InfeasibleError, InvalidStateError, ResourceLimitError, SolverLimitError
from .history import HistoryTree, VerifyReport, adjusted_to_original, verify_tree
from .lp import LinearProgram, LPSolution, solve
from .oracle import global_lp_multi, global_lp_single, markov_lp
from .pwl import PiecewiseLinearConcave, add_linear, argmax, evaluate, upper_concave_envelope
from .statmech import (StaticMechanism, evaluate_mechanism, shift_payments,
                       utility_constrained_surplus)
from .tradeoff import TradeoffInstance, best_step_allocation, solve_tradeoff

__version__ = "0.1.0"
