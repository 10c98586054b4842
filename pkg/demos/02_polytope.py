"""
Digraphs, corners and membership
================================

Every digraph in the family gives a win vector indeg/(2n).  The greedy
digraphs built from corner sequences span the polytope, and membership is
decided two ways: an arc-flow LP and a convex-hull LP over the corners.
"""

from fractions import Fraction as F

from matchplay.polytope import (
    arc_flow_membership,
    corner_sequences,
    corner_table_csv,
    corners,
    enumerate_digraphs,
    hull_membership,
    linf_distance,
)

for n in range(2, 7):
    print(f"n={n}: {len(enumerate_digraphs(n))} digraphs, "
          f"{len(corner_sequences(n))} corner sequences, {len(corners(n))} distinct corners")

print()
print(corner_table_csv(3))

# a member comes back with a flow, a non-member with a Farkas certificate
for x in ([F(1, 3), F(1, 2), F(1, 6)], [F(3, 10), F(2, 5), F(3, 10)]):
    ok, witness = arc_flow_membership(x)
    same, _ = hull_membership(x, 3)
    print(" ".join(map(str, x)), "member" if ok else "outside", "(hull LP agrees)" if ok == same else "")
    if ok:
        for row in witness.m:
            print("   flow row:", " ".join(map(str, row)))
    else:
        print("   distance to the polytope:", linf_distance(x))

# the extremes of the n = 4 polytope
cs = corners(4)
print("n=4: min x1 =", min(c[0] for c in cs), " max x3 =", max(c[2] for c in cs))
