# Two equal-revenue periods: selling each item separately earns 2, while
# linking the periods earns more. The gain is capped by the first period's
# support, so it keeps growing only as both supports grow.
from dynmech import equal_revenue_discrete
from dynmech.approx import mechanism1_revenue
from dynmech.history import tree_size
from dynmech.oracle import global_lp_single


def optimum(n, N):
    dists = [equal_revenue_discrete(n), equal_revenue_discrete(N)]
    # neighbouring IC rows suffice for large trees and keep the LP small
    ic = "all" if tree_size(dists) <= 200 else "adjacent"
    return mechanism1_revenue(dists), global_lp_single(dists, ic=ic)[0]


for N in [5, 20, 100]:
    seq, opt = optimum(3, N)
    print(f"n=3  N={N:3d}  sequential {seq:.4f}  optimal {opt:.4f}")

for n in [2, 3, 5, 10]:
    seq, opt = optimum(n, 200)
    print(f"n={n:<2d} N=200  sequential {seq:.4f}  optimal {opt:.4f}")
