"""
Symmetry, honesty, fairness, futility
=====================================

Each check evaluates the tournament exactly on a fixed set of sample
matrices and returns a witness when it fails.  A clean run only means no
counterexample was found on the samples.
"""

from matchplay import P_STAR, sequentialize
from matchplay.analysis import (
    check_fairness,
    check_futility,
    check_honesty,
    check_rounds_honesty,
    check_symmetry,
    standard_samples,
)
from matchplay.zoo import (
    make_coin_before_match,
    make_player_one_wins,
    make_roundrobin_repeat,
    make_rounds_example,
    make_unfair3,
    make_uniform_winner,
)

S3 = standard_samples(3)
zoo = [make_unfair3("T1", 2), make_unfair3("T2", 2), make_roundrobin_repeat(3, 2),
       make_uniform_winner(3), make_player_one_wins(3)]

for T in zoo:
    verdicts = [check_symmetry(T, S3), check_honesty(T, S3), check_futility(T, S3)]
    print(f"{T.name:22s}", "  ".join(f"{r.name}={r.verdict}" for r in verdicts))

# T1 is honest and symmetric but not fair at P*: player 2 beats player 1
rep = check_fairness(make_unfair3("T1", 2), [P_STAR])
w = rep.witnesses[0]
print("\nfairness of T1 at P*:", rep.verdict, "players", w["players"], w["pi_i"], "<", w["pi_next"])

# a coin tossed before the match decides whether winning helps
rep = check_honesty(make_coin_before_match(), standard_samples(2))
print("coin before the match:", rep.verdict, "at state", rep.witnesses[0]["state"])

# simultaneous rounds: honest as rounds, dishonest once the matches are serialized
S4 = standard_samples(4)
print("rounds example as rounds:", check_rounds_honesty(make_rounds_example(), S4).verdict)
rep = check_honesty(sequentialize(make_rounds_example()), S4)
w = rep.witnesses[0]
print("same tournament one match at a time:", rep.verdict,
      f"player {w['player']}: {w['pi_plus']} if it wins, {w['pi_minus']} if it loses")
