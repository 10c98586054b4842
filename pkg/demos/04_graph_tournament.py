"""
A tournament aimed at a chosen corner
=====================================

Exclude a random player, let the others play N round-robins, and hand out
tokens according to the arcs of a digraph G.  With a rule matrix whose
entries are far apart the remainers recognise each other, and the win
vector approaches indeg/(2n).
"""

from matchplay import exact_win_vector, simulate
from matchplay.polytope import graph_vector, sigma_to_digraph
from matchplay.zoo import GraphTournamentSpec, default_p_param, make_graph_tournament, token_audit

P = default_p_param(4)
print("rule matrix:", P)

G = sigma_to_digraph((2, 3, 1, 4))
target = graph_vector(G)
print("digraph:", G.arcs())
print("target :", " ".join(str(x) for x in target))

for N in (1, 4, 12):
    v = exact_win_vector(make_graph_tournament(GraphTournamentSpec(G, P, N)), P).win_vector
    gap = max(abs(a - b) for a, b in zip(v, target))
    print(f"N={N:5d} exact    ", " ".join(f"{float(x):.4f}" for x in v), f" gap {float(gap):.4f}")

for N in (200, 2000):
    rep = simulate(make_graph_tournament(GraphTournamentSpec(G, P, N)), P, 20_000, seed=N)
    gap = max(abs(a - float(b)) for a, b in zip(rep.empirical, target))
    print(f"N={N:5d} simulated", " ".join(f"{x:.4f}" for x in rep.empirical), f" gap {gap:.4f}")

# the tokens handed to remainers never exceed one, for every digraph and outcome
for n, N in ((4, 3), (5, 1)):
    a = token_audit(n, N)
    print(f"token audit n={n} N={N}: {a.outcomes} outcomes x {a.graphs} digraphs, max total {a.max_total}")
