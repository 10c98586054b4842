"""
Exact and simulated win vectors
===============================

Two three-player tournaments that exclude a random player and let the other
two play N matches.  Exact evaluation at N = 2, then simulation at N = 1000.
"""

from fractions import Fraction

from matchplay import P_STAR, exact_win_vector, simulate
from matchplay.zoo import make_unfair3

# player 1 always beats player 3; every other match is a coin flip
print("P* =", P_STAR)

for variant in ("T1", "T2"):
    rep = exact_win_vector(make_unfair3(variant, 2), P_STAR)
    print(variant, "N=2 exact:", " ".join(str(x) for x in rep.win_vector),
          f"({rep.states_visited} states)")

# as N grows the "big win" threshold separates the strong player cleanly
for variant, limit in (("T1", (1 / 3, 1 / 2, 1 / 6)), ("T2", (2 / 3, 0, 1 / 3))):
    rep = simulate(make_unfair3(variant, 1000), P_STAR, 20_000, seed=7)
    est = " ".join(f"{x:.3f}" for x in rep.empirical)
    print(variant, "N=1000 simulated:", est, " limit:", " ".join(f"{x:.3f}" for x in limit))

# exact values sum to one as rationals, no rounding anywhere
assert sum(exact_win_vector(make_unfair3("T1", 6), P_STAR).win_vector) == Fraction(1)
