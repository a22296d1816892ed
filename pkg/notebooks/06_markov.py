# Stationary mechanisms that see today's and yesterday's report. Posting
# the monopoly price every day is feasible, but it is not always optimal.
from fractions import Fraction

from dynmech import DiscreteDistribution, equal_revenue_discrete, monopoly
from dynmech.oracle import markov_lp

for d in [DiscreteDistribution.uniform([1.0, 2.0]), equal_revenue_discrete(5)]:
    row = [markov_lp(d, delta) for delta in (0.1, 0.5, 0.9, 0.99)]
    print(d, "monopoly", monopoly(d)[1], "markov", [round(v, 4) for v in row])

# uniform{1,2}, delta = 1/10: this mechanism earns 43/42 per day
F = Fraction
v, f, delta = [F(1), F(2)], [F(1, 2), F(1, 2)], F(1, 10)
x = [[F(1, 21), F(1)], [F(1), F(1)]]
p = [[F(1, 21), F(2)], [F(1), F(22, 21)]]
U = [delta * sum(f[c] * (v[c] * x[r][c] - p[r][c]) for c in range(2)) for r in range(2)]
gain = max((v[j] * x[a][l] - p[a][l] + U[l]) - (v[j] * x[a][j] - p[a][j] + U[j])
           for a in range(2) for j in range(2) for l in range(2))
ir = min(v[j] * x[a][j] - p[a][j] for a in range(2) for j in range(2))
rev = sum(f[a] * f[b] * p[a][b] for a in range(2) for b in range(2))
print("best deviation gain", gain, "min stage utility", ir, "revenue", rev)
