import random
from fractions import Fraction as F

import pytest

from matchplay import P_STAR, MatchMatrix, WinVector, exact_win_vector, simulate
from matchplay.analysis import random_interior
from matchplay.core import DistinctnessError, epsilon_of, is_doubly_monotonic, is_strictly_doubly_monotonic
from matchplay.engine import exact_rounds_win_vector
from matchplay.polytope import Digraph, enumerate_digraphs, graph_vector, sigma_to_digraph
from matchplay.zoo import (
    GraphTournamentSpec,
    Identifier,
    build,
    chain4_holds,
    default_p_param,
    empirical_matrix,
    make_graph_tournament,
    make_map_tournament,
    make_roundrobin_repeat,
    make_rounds_example,
    make_single_elim_random,
    make_unfair3,
    strictify_map,
    token_audit,
    uniform_map,
    uniform_strict_map,
    zoo_names,
)


def wv(T, P):
    return exact_win_vector(T, P).win_vector


U3 = MatchMatrix.uniform(3)


@pytest.mark.parametrize("T", [make_roundrobin_repeat(3, 2), make_roundrobin_repeat(3, 3, "min_out_then_coin"),
                               make_unfair3("T1", 3), make_unfair3("T2", 4), make_single_elim_random(4)],
                         ids=lambda T: T.name)
def test_uniform_matrix_gives_uniform_vector(T):
    assert wv(T, MatchMatrix.uniform(T.n)) == WinVector.uniform(T.n)


def test_unfair3_trends_toward_limits():
    d1 = [abs(wv(make_unfair3("T1", N), P_STAR).pi(2) - F(1, 2)) for N in (4, 12, 40)]
    d2 = [wv(make_unfair3("T2", N), P_STAR).pi(2) for N in (4, 12, 40)]
    assert d1[0] > d1[1] > d1[2]
    assert d2[0] > d2[1] > d2[2]


def test_unfair3_guards():
    with pytest.raises(ValueError):
        make_unfair3("T9", 2)
    with pytest.raises(ValueError):
        make_unfair3("T1", 1)


def test_roundrobin_strong_player_favoured():
    P = MatchMatrix.from_upper(3, {(1, 2): F(3, 4), (1, 3): F(3, 4), (2, 3): F(1, 2)})
    a, b = wv(make_roundrobin_repeat(3, 1), P), wv(make_roundrobin_repeat(3, 3), P)
    assert b.pi(1) > a.pi(1) > F(1, 3)
    assert a.pi(2) == a.pi(3)


def test_roundrobin_guards():
    with pytest.raises(ValueError):
        make_roundrobin_repeat(4, 1, "min_out_then_coin")
    with pytest.raises(ValueError):
        make_roundrobin_repeat(3, 1, "nope")


def test_single_elim():
    P = MatchMatrix.from_upper(2, {(1, 2): F(2, 3)})
    assert wv(make_single_elim_random(2), P) == (F(2, 3), F(1, 3))
    P4 = random_interior(4, random.Random(1))
    v = wv(make_single_elim_random(4), P4)
    assert sum(v) == 1
    p = lambda i, j: P4[i, j]  # noqa: E731
    # player 1 wins the semifinal, then beats whichever of the other two reaches the final
    want = F(0)
    for a in (2, 3, 4):
        c, d = (x for x in (2, 3, 4) if x != a)
        want += F(1, 3) * p(1, a) * (p(c, d) * p(1, c) + p(d, c) * p(1, d))
    assert v.pi(1) == want
    with pytest.raises(ValueError):
        make_single_elim_random(3)


def test_h_at_pstar():
    assert uniform_strict_map(3)(P_STAR) == (F(1, 2), F(1, 3), F(1, 6))
    assert uniform_strict_map(3)(U3) == WinVector.uniform(3)


def test_strictify_bounds():
    g = uniform_map(3)
    f = strictify_map(g, F(1, 10))
    v = f(P_STAR)
    h = uniform_strict_map(3)(P_STAR)
    assert list(v) == [F(19, 20) * F(1, 3) + F(1, 20) * x for x in h]
    assert sum(v) == 1
    with pytest.raises(ValueError):
        strictify_map(g, 0)


def test_map_tournament_with_h_two_players():
    for p in (F(1, 5), F(1, 2), F(7, 9)):
        P = MatchMatrix.from_upper(2, {(1, 2): p})
        M = make_map_tournament(uniform_strict_map(2), 2, 1)
        assert wv(M, P) == (p, 1 - p)


def test_map_tournament_guards():
    with pytest.raises(ValueError):
        make_map_tournament(uniform_map(3), 4, 1)
    with pytest.raises(ValueError):
        make_map_tournament(uniform_map(3), 3, 0)


def test_empirical_matrix():
    M = empirical_matrix(3, 4, (3, 1, 2))
    assert (M[1, 2], M[1, 3], M[2, 3], M[2, 1]) == (F(3, 4), F(1, 4), F(1, 2), F(1, 4))


def test_default_p_param():
    for n in (4, 5, 6):
        P = default_p_param(n)
        assert is_strictly_doubly_monotonic(P)
        m = n * (n - 1) // 2
        assert epsilon_of(P) == F(1, 4 * m)
    assert chain4_holds(default_p_param(4))
    assert default_p_param(5, seed=1) == default_p_param(5, seed=1)


def test_graph_spec_validation():
    G4 = sigma_to_digraph((4, 3, 2, 1))
    P4 = default_p_param(4)
    with pytest.raises(ValueError):
        GraphTournamentSpec(G4, default_p_param(5), 1)
    with pytest.raises(ValueError):
        GraphTournamentSpec(G4, P4, 0)
    with pytest.raises(ValueError):
        GraphTournamentSpec(sigma_to_digraph((3, 2, 1)), default_p_param(3), 1)
    pairs = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]
    flipped = MatchMatrix.from_upper(4, {pq: 1 - P4[pq] for pq in pairs})
    with pytest.raises(ValueError):
        GraphTournamentSpec(G4, flipped, 1)
    with pytest.raises(DistinctnessError):
        GraphTournamentSpec(G4, MatchMatrix.uniform(4), 1)
    bad_chain = MatchMatrix.from_upper(4, {(2, 3): F(7, 12), (1, 2): F(8, 12), (1, 3): F(10, 12),
                                           (3, 4): F(9, 12), (2, 4): F(11, 12), (1, 4): F(23, 24)})
    assert is_doubly_monotonic(bad_chain) and not chain4_holds(bad_chain)
    with pytest.raises(ValueError):
        GraphTournamentSpec(G4, bad_chain, 1)


def test_identifier_at_parameter_is_exact():
    # with N large and the tally equal to the rule matrix, every remainer identifies everyone
    P = default_p_param(4)
    N = 12
    ident = Identifier(P, N)
    z = 4
    tally = tuple(int(P[a, b] * N) for a, b in [(1, 2), (1, 3), (2, 3)])
    assert all(P[a, b] * N == int(P[a, b] * N) for a, b in [(1, 2), (1, 3), (2, 3)])
    q = ident.qualify(z, tally)
    assert q and all(A == i for A, i, _ in q)


@pytest.mark.parametrize("n,N", [(4, 1), (4, 3), (4, 6), (4, 12), (5, 1), (5, 2)])
def test_token_audit(n, N):
    audit = token_audit(n, N)
    assert audit.ok, audit.violations[:3]
    assert audit.max_total <= 1


def test_graph_tournament_vectors_sum_to_one():
    P = default_p_param(4)
    for G in random.Random(3).sample(enumerate_digraphs(4), 8):
        v = wv(make_graph_tournament(GraphTournamentSpec(G, P, 2)), P)
        assert sum(v) == 1


def test_all_loops_graph_tends_to_uniform():
    G = Digraph(4, [(1, 1), (2, 2), (3, 3), (4, 4)])
    assert graph_vector(G) == WinVector.uniform(4)
    P = default_p_param(4)
    T = make_graph_tournament(GraphTournamentSpec(G, P, 3))
    assert wv(T, P) == WinVector.uniform(4)


def test_graph_tournament_converges_n4():
    P = default_p_param(4)
    G = sigma_to_digraph((2, 3, 1, 4))
    T = make_graph_tournament(GraphTournamentSpec(G, P, 2000))
    rep = simulate(T, P, 20_000, seed=4)
    target = [float(x) for x in graph_vector(G)]
    assert max(abs(a - b) for a, b in zip(rep.empirical, target)) < 0.03


def test_rounds_example_pair_outcomes():
    R = make_rounds_example()
    for p in (F(1, 3), F(1, 2), F(4, 5)):
        P = MatchMatrix.from_upper(4, {pq: p for pq in [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]})
        v = exact_rounds_win_vector(R, P).win_vector
        assert sum(v) == 1


def test_registry():
    for name in zoo_names():
        T = build(name)
        assert T.n >= 2
    with pytest.raises(ValueError):
        build("nope")
