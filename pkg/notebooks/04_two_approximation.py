# Half monopoly pricing, half a report-independent allocation: at least
# half the optimal revenue, plus an upper bound on that optimum.
from dynmech import DiscreteDistribution, equal_revenue_discrete
from dynmech.approx import (combined_revenue, execute2, expected_revenue2, mechanism1_revenue, plan_approx,
                            upper_bound)
from dynmech.oracle import global_lp_single

cases = {
    "point masses": [DiscreteDistribution.point_mass(1.0)] * 2,
    "uniform pair": [DiscreteDistribution.uniform([1.0, 2.0])] * 2,
    "ER3 x ER8": [equal_revenue_discrete(3), equal_revenue_discrete(8)],
}
for name, dists in cases.items():
    pol = plan_approx(dists)
    opt, _ = global_lp_single(dists)
    m1, m2 = mechanism1_revenue(dists), expected_revenue2(pol)
    print(f"{name:13s} M1 {m1:.4f} M2 {m2:.4f} combined {combined_revenue(dists, pol):.4f} "
          f"OPT {opt:.4f} bound {upper_bound(dists, policy=pol):.4f}")

pol = plan_approx(cases["uniform pair"])
tr = execute2(pol, [2.0, 1.0])
print("mechanism 2 on reports (2, 1): alloc", tr.alloc, "pay", tr.pay)
