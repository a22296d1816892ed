# Single-period building blocks: posted prices, virtual values and the
# best surplus a seller can generate while promising the buyer a fixed
# expected utility.
import numpy as np

from dynmech import DiscreteDistribution, equal_revenue_discrete, monopoly, virtual_value
from dynmech.dist import posted_price_revenues, price_curves
from dynmech.statmech import evaluate_mechanism, prices_in_mixture, utility_constrained_surplus

# Equal revenue: every posted price earns the same.
er = equal_revenue_discrete(6)
print("ER(6) support", er.support)
print("revenue per price", np.round(posted_price_revenues(er), 12))
print("monopoly (ties go low)", monopoly(er))

d = DiscreteDistribution([1.0, 2.0, 4.0, 7.0], [0.4, 0.3, 0.2, 0.1])
phi = [virtual_value(d, j) for j in range(len(d))]
print("virtual values", np.round(phi, 4))
# Myerson: serve exactly the types with non-negative virtual value
print("monopoly", monopoly(d))

# (utility, surplus) of each posted price; the extra last point is "price above the top"
for p, u, S in price_curves(d):
    print(f"price {p:4.1f}  buyer utility {u:.3f}  surplus {S:.3f}")

# Promising utility c costs at most two prices mixed together.
for c in [0.0, 0.25, 0.6, 1.0, 1.9]:
    m, val = utility_constrained_surplus(d, c)
    st = evaluate_mechanism(m, d)
    print(f"c={c:4.2f} surplus {val:.4f} revenue {st.revenue:.4f} "
          f"prices mixed {prices_in_mixture(m, d)} alloc {np.round(m.alloc, 3)}")
