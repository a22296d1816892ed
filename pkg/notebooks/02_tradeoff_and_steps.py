# The tradeoff program: maximize surplus plus a concave function of the
# buyer's utility, subject to a bound on expected utility. A two-level
# step allocation gets at least half of the optimum.
import numpy as np

from dynmech import DiscreteDistribution, PiecewiseLinearConcave, TradeoffInstance
from dynmech import best_step_allocation, solve_tradeoff
from dynmech.pwl import add_linear
from dynmech.statmech import evaluate_mechanism
from dynmech.tradeoff import AT_MOST, TIGHT

d = DiscreteDistribution([1.0, 3.0, 4.0], [0.5, 0.3, 0.2])
g = PiecewiseLinearConcave([0.0, 0.5, 2.0], [0.0, 0.8, 1.2], right_slope=0.0)

for c in [0.0, 0.4, 1.0]:
    m, val = solve_tradeoff(TradeoffInstance(d, c, g, TIGHT))
    st = evaluate_mechanism(m, d)
    print(f"tight c={c}: value {val:.4f} alloc {np.round(m.alloc, 3)} "
          f"utilities {np.round(m.utilities(d), 3)} ic viol {st.max_ic_violation:.1e}")

# revenue plus g(u): same program with g(u) - u in place of g
c = 1.5
(alpha, nu), step = best_step_allocation(d, c, g)
_, opt = solve_tradeoff(TradeoffInstance(d, c, add_linear(g, -1.0), AT_MOST))
print(f"step allocation alpha={alpha} nu={nu}: {step:.4f}  optimum {opt:.4f}  ratio {step / opt:.3f}")

# zero g: the classic half-allocation below the monopoly price
u13 = DiscreteDistribution.uniform([1.0, 3.0])
zero = PiecewiseLinearConcave.constant(0.0)
print("uniform{1,3}", best_step_allocation(u13, np.inf, zero))
