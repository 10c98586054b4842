import json
import random
from fractions import Fraction as F

import pytest

from matchplay import P_STAR, MatchMatrix, WinVector, exact_win_vector, sequentialize
from matchplay.analysis import (
    DiscreteMap,
    NotIsomorphicError,
    PropertyReport,
    check_fairness,
    check_futility,
    check_honesty,
    check_monotonicity,
    check_rounds_honesty,
    check_symmetry,
    conjecture_probe,
    discrete_map_polytope,
    epsilon_distance,
    extend_discrete_map,
    grid_matrices,
    isomorphism_phi,
    levels,
    monotonic_samples,
    random_doubly_monotonic,
    standard_samples,
)
from matchplay.core import is_doubly_monotonic
from matchplay.engine import RoundsTournament, Round, Winner, mixture
from matchplay.polytope import hull_membership
from matchplay.zoo import (
    make_coin_after_match,
    make_map_tournament,
    make_player_one_wins,
    make_roundrobin_repeat,
    make_rounds_example,
    make_rounds_knockout4,
    make_rounds_loser_wins,
    make_single_elim_random,
    make_single_match,
    make_unfair3,
    make_uniform_winner,
    uniform_strict_map,
)

S3 = standard_samples(3)
T1, T2 = make_unfair3("T1", 2), make_unfair3("T2", 2)


def test_standard_samples_are_deterministic():
    assert standard_samples(3) == standard_samples(3)
    assert MatchMatrix.uniform(3) in S3 and P_STAR in S3
    assert len(set(S3)) == len(S3)
    assert all(is_doubly_monotonic(P) for P in monotonic_samples(4))


def test_symmetry():
    assert check_symmetry(T1, S3).passed
    rep = check_symmetry(make_player_one_wins(3), S3)
    assert not rep.passed and rep.witnesses[0]["player"] == 1


def test_uniform_winner_vacuous_honesty_and_futility():
    T5 = make_uniform_winner(3)
    assert check_honesty(T5, S3).verdict == "pass"
    assert check_futility(T5, S3).verdict == "pass"


def test_futility_fails_when_matches_matter():
    rep = check_futility(T1, S3)
    assert not rep.passed
    w = rep.witnesses[0]
    assert w["pi_plus"] != w["pi_minus"]


def test_honesty_on_zoo():
    for T in (T1, T2, make_roundrobin_repeat(3, 2)):
        assert check_honesty(T, S3).verdict == "pass-on-samples"
    assert not check_honesty(make_coin_after_match(F(1, 10)), standard_samples(2)).passed


def test_strict_honesty():
    S2 = standard_samples(2)
    assert check_honesty(make_single_match(), S2, strict=True).passed
    assert not check_honesty(make_coin_after_match(F(1, 2)), S2, strict=True).passed
    rep = check_honesty(make_single_elim_random(4), standard_samples(4), strict=True)
    assert rep.passed


def test_strict_honesty_requires_every_pair_to_meet():
    rep = check_honesty(make_unfair3("T2", 2), [MatchMatrix.uniform(3)], strict=True)
    assert not rep.passed and rep.witnesses[0]["pi_plus"] == rep.witnesses[0]["pi_minus"]
    R = RoundsTournament(3, "s", lambda s: Round(((1, 2),), lambda w: ("w", w[0]))
                         if s == "s" else Winner(s[1]), 1)
    rep = check_honesty(sequentialize(R), [MatchMatrix.uniform(3)], strict=True)
    assert not rep.passed and rep.witnesses[0]["never_meet"] == [(1, 3), (2, 3)]


def test_fairness():
    rep = check_fairness(T1, [P_STAR])
    assert rep.witnesses[0]["players"] == (1, 2)
    assert check_fairness(make_roundrobin_repeat(3, 2), monotonic_samples(3)).passed
    with pytest.raises(ValueError):
        check_fairness(T1, [MatchMatrix.from_upper(3, {(1, 2): F(1, 4), (1, 3): F(1, 2), (2, 3): F(1, 2)})])


def test_monotonicity():
    assert check_monotonicity(make_roundrobin_repeat(3, 2), S3, experiments=50, seed=1).passed
    assert check_monotonicity(make_single_elim_random(4), standard_samples(4), 20, seed=2).passed
    loser = sequentialize(make_rounds_loser_wins())
    assert not check_monotonicity(loser, standard_samples(2), 20, seed=3).passed


def test_size_mismatch_rejected():
    with pytest.raises(ValueError):
        check_symmetry(T1, standard_samples(4))
    with pytest.raises(ValueError):
        check_honesty(T1, [])


def test_fair_honest_symmetric_bounds_at_samples():
    # on doubly monotonic samples a symmetric honest fair tournament keeps
    # the top player at least 1/n and the second at most 1/2
    for T in (make_roundrobin_repeat(3, 1), make_roundrobin_repeat(3, 3)):
        for P in monotonic_samples(3):
            v = exact_win_vector(T, P).win_vector
            assert v.pi(1) >= F(1, 3)
            assert v.pi(2) <= F(1, 2)
            assert v.pi(3) <= F(1, 3)


def test_achieved_vectors_in_corner_hull():
    vecs = [exact_win_vector(T, P).win_vector
            for T in (make_roundrobin_repeat(3, 2), make_roundrobin_repeat(3, 3, "min_out_then_coin"))
            for P in monotonic_samples(3)]
    assert conjecture_probe(vecs, 3) == []
    assert all(hull_membership(v, 3)[0] for v in vecs)


def test_epsilon_distance():
    T5 = make_uniform_winner(3)
    assert epsilon_distance(T5, T5, S3) == 0
    mix = mixture(T5, T1, F(99, 100))
    assert epsilon_distance(mix, T5, S3) <= F(1, 100)
    assert epsilon_distance(T1, T2, [P_STAR]) == F(1, 4)
    est = epsilon_distance(T5, T5, [P_STAR], trials_a=20_000, seed=3)
    assert est < F(2, 100)
    with pytest.raises(ValueError):
        epsilon_distance(T1, make_uniform_winner(4), S3)


def test_isomorphism_phi():
    P = MatchMatrix.from_upper(3, {(1, 2): F(1, 2), (1, 3): F(3, 4), (2, 3): F(3, 4)})
    Q = MatchMatrix.from_upper(3, {(1, 2): F(1, 2), (1, 3): F(2, 3), (2, 3): F(2, 3)})
    phi = isomorphism_phi(P, Q)
    assert phi.apply(P) == Q
    assert phi(F(1, 4)) == F(1, 3) and phi(0) == 0 and phi(1) == 1
    assert phi(F(1, 8)) == F(1, 6)
    for x in (F(1, 10), F(3, 10), F(7, 9)):
        assert phi(1 - x) == 1 - phi(x)


def test_not_isomorphic():
    P = MatchMatrix.from_upper(3, {(1, 2): F(1, 2), (1, 3): F(3, 4), (2, 3): F(2, 3)})
    Q = MatchMatrix.from_upper(3, {(1, 2): F(1, 2), (1, 3): F(2, 3), (2, 3): F(3, 4)})
    with pytest.raises(NotIsomorphicError) as exc:
        isomorphism_phi(P, Q)
    assert exc.value.witness
    with pytest.raises(NotIsomorphicError):
        isomorphism_phi(P_STAR, MatchMatrix.from_upper(3, {(1, 2): F(1, 2), (1, 3): F(9, 10),
                                                          (2, 3): F(1, 2)}))


def test_map_polytope_invariant_under_isomorphism():
    P = MatchMatrix.from_upper(3, {(1, 2): F(1, 2), (1, 3): F(3, 4), (2, 3): F(3, 4)})
    Q = MatchMatrix.from_upper(3, {(1, 2): F(1, 2), (1, 3): F(2, 3), (2, 3): F(2, 3)})
    a, b = discrete_map_polytope(P), discrete_map_polytope(Q)
    for c in ([1, 0, 0], [0, 1, 0], [0, 0, 1], [2, -1, 3]):
        assert a.optimize(c)[0] == b.optimize(c)[0]
        assert a.optimize(c, maximize=False)[0] == b.optimize(c, maximize=False)[0]


def test_map_polytope_contains_induced_maps():
    P = MatchMatrix.from_upper(3, {(1, 2): F(1, 2), (1, 3): F(3, 4), (2, 3): F(3, 4)})
    poly = discrete_map_polytope(P)
    h = uniform_strict_map(3)
    assert poly.contains(DiscreteMap.from_map(P, h))
    assert poly.contains(DiscreteMap.from_map(P, lambda Q: WinVector.uniform(3)))
    one = DiscreteMap.from_map(P, lambda Q: WinVector([1, 0, 0]))
    assert not poly.contains(one)
    assert poly.contains_vector(h(P))
    assert not poly.contains_vector([1, 0, 0])


def test_map_polytope_optimum_is_a_member():
    poly = discrete_map_polytope(P_STAR)
    value, f = poly.optimize([0, 1, 0])
    assert poly.contains(f)
    assert f(P_STAR).pi(2) == value


def test_levels_and_grid():
    assert levels(P_STAR) == [0, F(1, 2), 1]
    assert len(grid_matrices(P_STAR)) == 27
    with pytest.raises(ValueError):
        grid_matrices(random_doubly_monotonic(5, random.Random(0)), limit=100)


def test_extend_discrete_map():
    f = DiscreteMap.from_map(P_STAR, uniform_strict_map(3))
    assert extend_discrete_map(f, P_STAR) == f(P_STAR)
    Q = MatchMatrix.from_upper(3, {(1, 2): F(3, 4), (1, 3): F(1, 4), (2, 3): F(1, 2)})
    # h is affine, so extending its restriction recovers h
    assert extend_discrete_map(f, Q) == uniform_strict_map(3)(Q)
    assert sum(extend_discrete_map(DiscreteMap.from_map(P_STAR, lambda R: WinVector([1, 0, 0])), Q)) == 1


def test_rounds_honesty():
    S4 = standard_samples(4)
    assert check_rounds_honesty(make_rounds_example(), S4).passed
    assert check_rounds_honesty(make_rounds_knockout4(), S4).passed
    assert not check_rounds_honesty(make_rounds_loser_wins(), standard_samples(2)).passed


def test_rounds_honesty_lost_by_sequentializing():
    rep = check_honesty(sequentialize(make_rounds_example()), standard_samples(4))
    assert not rep.passed
    w = rep.witnesses[0]
    assert w["pi_plus"] < w["pi_minus"]


def test_rounds_example_conditional_values():
    # all matches at p: inside a round the tied-pair result is a fair coin
    p = F(2, 3)
    P = MatchMatrix.from_upper(4, {pq: p for pq in [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]})
    seq = sequentialize(make_rounds_example())
    assert sum(exact_win_vector(seq, P).win_vector) == 1
    assert check_rounds_honesty(make_rounds_example(), [P]).passed


def test_single_pair_round_agrees_with_sequential():
    R = RoundsTournament(2, "s", lambda s: Round(((1, 2),), lambda w: ("w", w[0]))
                         if s == "s" else Winner(s[1]), 1)
    S2 = standard_samples(2)
    assert check_rounds_honesty(R, S2).verdict == check_honesty(sequentialize(R), S2).verdict


def test_map_tournament_properties():
    M = make_map_tournament(uniform_strict_map(3), 3, 2)
    assert check_symmetry(M, S3[:4]).passed
    assert check_honesty(M, S3[:4]).passed


def test_report_json():
    rep = check_fairness(T1, [P_STAR])
    data = json.loads(json.dumps(rep.to_json()))
    assert data["verdict"] == "fail" and data["witnesses"][0]["pi_i"] == "3/8"
    with pytest.raises(ValueError):
        PropertyReport("x", "fail", [])
    with pytest.raises(ValueError):
        PropertyReport("x", "maybe")
