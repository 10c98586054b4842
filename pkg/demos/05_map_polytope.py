"""
Symmetric honest maps on a grid
===============================

Restrict a tournament map to the matrices whose entries come from the levels
of P.  Symmetry and honesty become linear constraints, so the best and worst
achievable values at P are linear programs solved in exact arithmetic.
"""

from fractions import Fraction as F

from matchplay import P_STAR, MatchMatrix
from matchplay.analysis import DiscreteMap, discrete_map_polytope, extend_discrete_map, isomorphism_phi
from matchplay.zoo import uniform_strict_map

poly = discrete_map_polytope(P_STAR)
print(f"P* grid: {len(poly.grid)} matrices, {poly.orbits} orbit variables, {len(poly.mono)} honesty rows")
print("max f2(P*) =", poly.optimize([0, 1, 0])[0])
print("max f3(P*) =", poly.optimize([0, 0, 1])[0])
print("min f1(P*) =", poly.optimize([1, 0, 0], maximize=False)[0])

# the optimum only depends on the order of the entries
P = MatchMatrix.from_upper(3, {(1, 2): F(1, 2), (1, 3): F(3, 4), (2, 3): F(3, 4)})
Q = MatchMatrix.from_upper(3, {(1, 2): F(1, 2), (1, 3): F(2, 3), (2, 3): F(2, 3)})
phi = isomorphism_phi(P, Q)
print("\nphi breakpoints:", [(str(x), str(y)) for x, y in phi.breakpoints()])
for c in ([0, 1, 0], [1, 0, 0]):
    print("objective", c, discrete_map_polytope(P).optimize(c)[0], discrete_map_polytope(Q).optimize(c)[0])

# a grid map extends to any matrix by rounding each entry to its neighbouring levels
f = DiscreteMap.from_map(P_STAR, uniform_strict_map(3))
R = MatchMatrix.from_upper(3, {(1, 2): F(3, 5), (1, 3): F(9, 10), (2, 3): F(7, 10)})
print("\nextension at R:", " ".join(map(str, extend_discrete_map(f, R))))
