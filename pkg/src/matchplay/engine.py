"""Tournaments as finite-depth transition systems, exact evaluation and simulation.

A :class:`Tournament` is a start state plus a deterministic ``step`` function
returning one of

* :class:`Match`  -- play players ``i`` and ``j``; successor depends on the winner,
* :class:`Chance` -- move to one of several states with rational probabilities,
* :class:`Winner` -- the tournament is over,
* :class:`Block`  -- shorthand for a fixed schedule of matches whose continuation
  depends only on how many matches each player won against each opponent.

Blocks are a convenience for authors and a speed-up for the simulator.  The
engine expands every block into one Match decision per scheduled match (see
:meth:`Tournament.decide`), so exact evaluation and the property checkers
only ever see Match / Chance / Winner.

States must be hashable; equal states must have equal futures.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Hashable, NamedTuple, Sequence

import numpy as np

from .core import MatchMatrix, TournamentMap, WinVector, as_fraction, fraction_str

DEFAULT_MAX_STATES = 5_000_000
DECISION_CACHE = 1_000_000
TWO64 = 1 << 64


class DepthBoundExceeded(RuntimeError):
    pass


class StateLimitExceeded(RuntimeError):
    pass


def max_states_limit() -> int:
    return int(os.environ.get("TOURNEY_MAX_STATES", DEFAULT_MAX_STATES))


@dataclass(frozen=True)
class Match:
    i: int
    j: int
    if_i_wins: Hashable
    if_j_wins: Hashable

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError(f"a player cannot meet itself (player {self.i})")


@dataclass(frozen=True)
class Chance:
    branches: tuple

    def __post_init__(self):
        branches = tuple((as_fraction(p), s) for p, s in self.branches)
        if not branches:
            raise ValueError("a chance node needs at least one branch")
        if any(p < 0 for p, _ in branches):
            raise ValueError("negative branch probability")
        if sum(p for p, _ in branches) != 1:
            raise ValueError(f"branch probabilities sum to {sum(p for p, _ in branches)}")
        object.__setattr__(self, "branches", branches)

    @classmethod
    def uniform(cls, states: Sequence) -> "Chance":
        w = Fraction(1, len(states))
        return cls(tuple((w, s) for s in states))


@dataclass(frozen=True)
class Winner:
    k: int


@dataclass(frozen=True)
class Block:
    """Play ``pairs`` in order, then continue at ``then(tally)``.

    ``tally`` is a tuple aligned with :attr:`distinct` (the sorted unordered
    pairs (a, b), a < b, occurring in the schedule); entry ``t`` is the number
    of matches ``a`` won against ``b``.
    """

    pairs: tuple
    then: Callable[[tuple], Hashable] = field(compare=False)

    def __post_init__(self):
        pairs = tuple((int(a), int(b)) for a, b in self.pairs)
        for a, b in pairs:
            if a == b:
                raise ValueError(f"a player cannot meet itself (player {a})")
        object.__setattr__(self, "pairs", pairs)

    @property
    def distinct(self) -> tuple:
        return _distinct_pairs(self.pairs)


_DISTINCT_CACHE: dict = {}


def _distinct_pairs(pairs: tuple) -> tuple:
    out = _DISTINCT_CACHE.get(pairs)
    if out is None:
        out = tuple(sorted({(min(a, b), max(a, b)) for a, b in pairs}))
        _DISTINCT_CACHE[pairs] = out
    return out


class InBlock(NamedTuple):
    """Engine-internal state: ``position`` matches of the block at ``origin`` played."""

    origin: Hashable
    position: int
    tally: tuple


Decision = Match | Chance | Winner


class Tournament:
    """An n-player tournament.

    ``max_matches`` bounds the number of matches on any play path; exact
    evaluation raises :class:`DepthBoundExceeded` if a path is longer.
    """

    def __init__(self, n: int, initial_state: Hashable, step: Callable[[Any], Any],
                 max_matches: int, name: str = "tournament"):
        if n < 1:
            raise ValueError("a tournament needs at least one player")
        self.n = n
        self.initial_state = initial_state
        self.step = step
        self.max_matches = max_matches
        self.name = name
        self._raw: dict = {}

    def __repr__(self):
        return f"Tournament({self.name}, n={self.n})"

    def raw_step(self, state):
        """``step(state)``, memoized (step is deterministic)."""
        d = self._raw.get(state)
        if d is None:
            d = self.step(state)
            if len(self._raw) < DECISION_CACHE:
                self._raw[state] = d
        return d

    def decide(self, state) -> Decision:
        """The Match / Chance / Winner decision at ``state`` with blocks expanded."""
        if isinstance(state, InBlock):
            block = self.raw_step(state.origin)
            return self._block_match(state.origin, block, state.position, state.tally)
        d = self.raw_step(state)
        if isinstance(d, Block):
            if not d.pairs:
                return Chance(((Fraction(1), d.then(())),))
            return self._block_match(state, d, 0, (0,) * len(d.distinct))
        if not isinstance(d, (Match, Chance, Winner)):
            raise TypeError(f"step returned {type(d).__name__}, not a decision")
        if isinstance(d, Winner) and not 1 <= d.k <= self.n:
            raise ValueError(f"winner {d.k} is not a player of {self.name}")
        return d

    def _block_match(self, origin, block: Block, position: int, tally: tuple) -> Match:
        a, b = block.pairs[position]
        distinct = block.distinct
        idx = distinct.index((min(a, b), max(a, b)))
        lo_wins = list(tally)
        lo_loses = list(tally)
        if a < b:
            lo_wins[idx] += 1
            succ_a, succ_b = tuple(lo_wins), tuple(lo_loses)
        else:
            lo_wins[idx] += 1
            succ_a, succ_b = tuple(lo_loses), tuple(lo_wins)
        if position + 1 == len(block.pairs):
            return Match(a, b, block.then(succ_a), block.then(succ_b))
        return Match(a, b, InBlock(origin, position + 1, succ_a), InBlock(origin, position + 1, succ_b))


# ---------------------------------------------------------------------------
# exact evaluation


@dataclass
class EvalReport:
    win_vector: WinVector
    states_visited: int
    leaf_count: int

    def to_json(self) -> dict:
        return {
            "win_vector": self.win_vector.to_json(),
            "states_visited": self.states_visited,
            "leaf_count": self.leaf_count,
        }


class Evaluation:
    """Win vectors for every state reachable (structurally) from ``root``.

    ``values[s]`` is the list of exact win probabilities from state ``s``;
    ``edges[s]`` is either an int (winner) or a list of (probability, child).
    """

    def __init__(self, n: int, values: dict, edges: dict, kinds: dict, root):
        self.n = n
        self.values = values
        self.edges = edges
        self.kinds = kinds
        self.root = root

    def vector(self, state=None) -> WinVector:
        return WinVector(self.values[self.root if state is None else state])

    def reachable(self) -> list:
        """States reached with positive probability, in BFS order from the root."""
        seen = {self.root}
        order = [self.root]
        frontier = [self.root]
        while frontier:
            nxt = []
            for s in frontier:
                e = self.edges[s]
                if isinstance(e, int):
                    continue
                for w, c in e:
                    if w > 0 and c not in seen:
                        seen.add(c)
                        order.append(c)
                        nxt.append(c)
            frontier = nxt
        return order


def _solve(n: int, root, expand, bound: int | None, name: str, limit: int | None = None) -> Evaluation:
    """Evaluate a finite acyclic decision graph bottom-up without recursion.

    ``expand(state)`` returns ``(kind, cost, payload)`` where payload is a
    winner index for leaves or a list of (weight, child) pairs; ``cost`` is
    the number of matches consumed on the edge out of the state.
    """
    limit = max_states_limit() if limit is None else limit
    values: dict = {}
    depth: dict = {}
    edges: dict = {}
    kinds: dict = {}
    costs: dict = {}
    on_path: set = set()
    stack = [(root, False)]
    while stack:
        state, ready = stack.pop()
        if ready:
            on_path.discard(state)
            e = edges[state]
            acc = [Fraction(0)] * n
            deepest = 0
            for w, child in e:
                cv = values[child]
                deepest = max(deepest, depth[child])
                if w == 0:
                    continue
                for k in range(n):
                    if cv[k]:
                        acc[k] += w * cv[k]
            values[state] = acc
            depth[state] = deepest + costs[state]
            continue
        if state in values:
            continue
        if state in on_path:
            raise DepthBoundExceeded(f"{name} revisits state {state!r}; it never terminates")
        kind, cost, payload = expand(state)
        kinds[state] = kind
        if kind == "winner":
            vec = [Fraction(0)] * n
            vec[payload - 1] = Fraction(1)
            values[state] = vec
            depth[state] = 0
            edges[state] = payload
            continue
        if len(edges) > limit:
            raise StateLimitExceeded(f"{name}: more than {limit} states (set TOURNEY_MAX_STATES)")
        edges[state] = payload
        costs[state] = cost
        on_path.add(state)
        stack.append((state, True))
        for _, child in payload:
            if child not in values:
                stack.append((child, False))
    if bound is not None and depth[root] > bound:
        raise DepthBoundExceeded(f"{name} can play {depth[root]} matches, bound is {bound}")
    return Evaluation(n, values, edges, kinds, root)


def _tournament_expander(T: Tournament, P: MatchMatrix):
    rows = P.rows

    def expand(state):
        d = T.decide(state)
        if isinstance(d, Winner):
            return "winner", 0, d.k
        if isinstance(d, Chance):
            return "chance", 0, list(d.branches)
        p = rows[d.i - 1][d.j - 1]
        return "match", 1, [(p, d.if_i_wins), (1 - p, d.if_j_wins)]

    return expand


def evaluate(T: Tournament, P: MatchMatrix, state=None) -> Evaluation:
    """Exact values of every state below ``state`` (default: the start)."""
    if P.n != T.n:
        raise ValueError(f"{T.name} has {T.n} players but the matrix has {P.n}")
    root = T.initial_state if state is None else state
    bound = T.max_matches if state is None else None
    return _solve(T.n, root, _tournament_expander(T, P), bound, T.name)


def exact_win_vector(T: Tournament, P: MatchMatrix, memo: bool = True) -> EvalReport:
    """Exact win vector of the specialization (T, P)."""
    if not memo:
        return _exact_tree(T, P)
    ev = evaluate(T, P)
    leaves = sum(1 for k in ev.kinds.values() if k == "winner")
    return EvalReport(ev.vector(), len(ev.values), leaves)


def _exact_tree(T: Tournament, P: MatchMatrix) -> EvalReport:
    """Plain tree walk without sharing; exponential, for cross-checking small cases."""
    if P.n != T.n:
        raise ValueError(f"{T.name} has {T.n} players but the matrix has {P.n}")
    expand = _tournament_expander(T, P)
    acc = [Fraction(0)] * T.n
    visited = leaves = 0
    stack = [(T.initial_state, Fraction(1), 0)]
    while stack:
        state, weight, played = stack.pop()
        visited += 1
        if played > T.max_matches:
            raise DepthBoundExceeded(f"{T.name} exceeded {T.max_matches} matches")
        kind, cost, payload = expand(state)
        if kind == "winner":
            leaves += 1
            acc[payload - 1] += weight
            continue
        for w, child in payload:
            stack.append((child, weight * w, played + cost))
    return EvalReport(WinVector(acc), visited, leaves)


def conditional_pair(T: Tournament, P: MatchMatrix, state) -> tuple:
    """(π_i⁺, π_i⁻, π_j⁺, π_j⁻) at a state announcing the match {i, j}."""
    d = T.decide(state)
    if not isinstance(d, Match):
        raise ValueError(f"state {state!r} of {T.name} is not a match state")
    ev_i = evaluate(T, P, d.if_i_wins)
    ev_j = evaluate(T, P, d.if_j_wins)
    vi, vj = ev_i.values[d.if_i_wins], ev_j.values[d.if_j_wins]
    return vi[d.i - 1], vj[d.i - 1], vj[d.j - 1], vi[d.j - 1]


def induced_map(T: Tournament) -> TournamentMap:
    """The map P -> wv(T, P)."""
    return TournamentMap(T.n, lambda P: exact_win_vector(T, P).win_vector, name=f"f[{T.name}]")


# ---------------------------------------------------------------------------
# combinators


def _wrap(tag, d):
    if isinstance(d, Winner):
        return d
    if isinstance(d, Match):
        return Match(d.i, d.j, (tag, d.if_i_wins), (tag, d.if_j_wins))
    if isinstance(d, Chance):
        return Chance(tuple((p, (tag, s)) for p, s in d.branches))
    if isinstance(d, Block):
        then = d.then
        return Block(d.pairs, lambda tally: (tag, then(tally)))
    raise TypeError(f"unknown decision {d!r}")


def mixture(T0: Tournament, T1: Tournament, p) -> Tournament:
    """With probability ``p`` play ``T0``, otherwise ``T1``."""
    p = as_fraction(p)
    if T0.n != T1.n:
        raise ValueError(f"cannot mix a {T0.n}-player and a {T1.n}-player tournament")
    if not 0 <= p <= 1:
        raise ValueError(f"mixing weight {p} outside [0, 1]")
    root = ("mixture-root",)

    def step(state):
        if state == root:
            return Chance(((p, (0, T0.initial_state)), (1 - p, (1, T1.initial_state))))
        tag, inner = state
        return _wrap(tag, (T0 if tag == 0 else T1).step(inner))

    return Tournament(T0.n, root, step, max(T0.max_matches, T1.max_matches),
                      name=f"mix({T0.name},{T1.name},{fraction_str(p)})")


# ---------------------------------------------------------------------------
# tournaments with rounds


@dataclass(frozen=True)
class Round:
    """Play vertex-disjoint ``pairs`` simultaneously, continue at ``then(winners)``.

    ``winners`` lists the winner of each pair in the order given.
    """

    pairs: tuple
    then: Callable[[tuple], Hashable] = field(compare=False)

    def __post_init__(self):
        pairs = tuple((int(a), int(b)) for a, b in self.pairs)
        seen = [x for pair in pairs for x in pair]
        if len(seen) != len(set(seen)):
            raise ValueError(f"pairs {pairs} are not vertex-disjoint")
        object.__setattr__(self, "pairs", pairs)


class RoundsTournament:
    """Like :class:`Tournament`, but ``step`` may return :class:`Round` instead of Match."""

    def __init__(self, n: int, initial_state, step, max_rounds: int, name: str = "rounds"):
        self.n = n
        self.initial_state = initial_state
        self.step = step
        self.max_rounds = max_rounds
        self.name = name

    def __repr__(self):
        return f"RoundsTournament({self.name}, n={self.n})"


def _rounds_expander(R: RoundsTournament, P: MatchMatrix):
    def expand(state):
        d = R.step(state)
        if isinstance(d, Winner):
            return "winner", 0, d.k
        if isinstance(d, Chance):
            return "chance", 0, list(d.branches)
        if not isinstance(d, Round):
            raise TypeError(f"{R.name} returned {type(d).__name__}")
        out = []
        for winners in itertools.product(*d.pairs):
            w = Fraction(1)
            for (a, b), win in zip(d.pairs, winners):
                w *= P[a, b] if win == a else P[b, a]
            out.append((w, d.then(tuple(winners))))
        return "round", 1, out

    return expand


def evaluate_rounds(R: RoundsTournament, P: MatchMatrix, state=None) -> Evaluation:
    root = R.initial_state if state is None else state
    bound = R.max_rounds if state is None else None
    return _solve(R.n, root, _rounds_expander(R, P), bound, R.name)


def exact_rounds_win_vector(R: RoundsTournament, P: MatchMatrix) -> EvalReport:
    ev = evaluate_rounds(R, P)
    leaves = sum(1 for k in ev.kinds.values() if k == "winner")
    return EvalReport(ev.vector(), len(ev.values), leaves)


def sequentialize(R: RoundsTournament) -> Tournament:
    """Play each round's matches one at a time in a uniformly random order."""

    def step(state):
        if state[0] == "r":
            d = R.step(state[1])
            if isinstance(d, Winner):
                return d
            if isinstance(d, Chance):
                return Chance(tuple((p, ("r", s)) for p, s in d.branches))
            m = len(d.pairs)
            if m == 0:
                return Chance(((Fraction(1), ("r", d.then(()))),))
            if m == 1:
                a, b = d.pairs[0]
                return Match(a, b, ("r", d.then((a,))), ("r", d.then((b,))))
            orders = list(itertools.permutations(range(m)))
            return Chance.uniform([("o", state[1], order, ()) for order in orders])
        _, inner, order, played = state
        d = R.step(inner)
        slot = order[len(played)]
        a, b = d.pairs[slot]

        def after(winner):
            res = played + ((slot, winner),)
            if len(res) == len(order):
                winners = tuple(w for _, w in sorted(res))
                return ("r", d.then(winners))
            return ("o", inner, order, res)

        return Match(a, b, after(a), after(b))

    return Tournament(R.n, ("r", R.initial_state), step, R.max_rounds * (R.n // 2),
                      name=f"seq({R.name})")


# ---------------------------------------------------------------------------
# Monte Carlo


@dataclass
class SimReport:
    trials: int
    seed: int
    counts: list
    empirical: list
    standard_errors: list

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "counts": self.counts,
            "empirical": self.empirical,
            "standard_errors": self.standard_errors,
            "note": "empirical frequencies are decimal estimates (display only)",
        }


def _threshold(p: Fraction) -> int:
    """Smallest integer t with u < t  <=>  u < p * 2**64 for every integer u."""
    return -((-p.numerator * TWO64) // p.denominator)


class _Sampler:
    """Walks a tournament with one uint64 draw per match or chance node."""

    def __init__(self, T: Tournament, P: MatchMatrix):
        self.T = T
        self.P = P
        self.match_t = [[_threshold(P.rows[i][j]) for j in range(P.n)] for i in range(P.n)]
        self._block_cache: dict = {}
        self._chance_cache: dict = {}
        self._decisions: dict = {}

    def _step(self, state):
        # step is deterministic, so decisions can be reused across trials
        d = self._decisions.get(state)
        if d is None:
            d = self.T.step(state)
            if len(self._decisions) < DECISION_CACHE:
                self._decisions[state] = d
        return d

    def _block_arrays(self, pairs: tuple):
        arr = self._block_cache.get(pairs)
        if arr is None:
            distinct = _distinct_pairs(pairs)
            index = {pq: k for k, pq in enumerate(distinct)}
            idx = np.array([index[(min(a, b), max(a, b))] for a, b in pairs], dtype=np.intp)
            lower_first = np.array([a < b for a, b in pairs])
            t = [self.match_t[a - 1][b - 1] for a, b in pairs]
            always = np.array([x >= TWO64 for x in t])
            clipped = np.array([min(x, TWO64 - 1) for x in t], dtype=np.uint64)
            arr = (idx, lower_first, always, clipped, len(distinct))
            self._block_cache[pairs] = arr
        return arr

    def _chance_thresholds(self, d: Chance):
        key = tuple(p for p, _ in d.branches)
        t = self._chance_cache.get(key)
        if t is None:
            cum = Fraction(0)
            t = []
            for p in key:
                cum += p
                t.append(_threshold(cum))
            self._chance_cache[key] = t
        return t

    def play(self, bitgen) -> int:
        T = self.T
        state = T.initial_state
        played = 0
        while True:
            d = self._step(state)
            if isinstance(d, Winner):
                return d.k
            if isinstance(d, Chance):
                u = int(bitgen.random_raw())
                for (p, s), t in zip(d.branches, self._chance_thresholds(d)):
                    if u < t:
                        state = s
                        break
                continue
            if isinstance(d, Match):
                played += 1
                u = int(bitgen.random_raw())
                state = d.if_i_wins if u < self.match_t[d.i - 1][d.j - 1] else d.if_j_wins
            elif isinstance(d, Block):
                played += len(d.pairs)
                if not d.pairs:
                    state = d.then(())
                    continue
                idx, lower_first, always, clipped, k = self._block_arrays(d.pairs)
                u = bitgen.random_raw(len(d.pairs))
                first_wins = (u < clipped) | always
                lower_wins = first_wins == lower_first
                tally = np.bincount(idx[lower_wins], minlength=k)
                state = d.then(tuple(int(x) for x in tally))
            else:
                raise TypeError(f"step returned {type(d).__name__}")
            if played > T.max_matches:
                raise DepthBoundExceeded(f"{T.name} exceeded {T.max_matches} matches")


def _trial_bitgen(seed: int, trial: int):
    return np.random.PCG64(np.random.SeedSequence([seed, trial]))


def _run_trials(T: Tournament, P: MatchMatrix, seed: int, start: int, stop: int) -> list:
    sampler = _Sampler(T, P)
    counts = [0] * T.n
    for trial in range(start, stop):
        counts[sampler.play(_trial_bitgen(seed, trial)) - 1] += 1
    return counts


_FORK_JOB: tuple | None = None


def _fork_worker(bounds):
    T, P, seed = _FORK_JOB
    return _run_trials(T, P, seed, *bounds)


def simulate(T: Tournament, P: MatchMatrix, trials: int, seed: int, workers: int = 1) -> SimReport:
    """Estimate the win vector from ``trials`` independent plays.

    Trial ``t`` draws from its own stream seeded by ``(seed, t)``, so the
    result depends only on ``(seed, trials)`` and not on ``workers``.
    """
    global _FORK_JOB
    if P.n != T.n:
        raise ValueError(f"{T.name} has {T.n} players but the matrix has {P.n}")
    if trials < 1:
        raise ValueError("need at least one trial")
    seed = int(seed) & (TWO64 - 1)
    if workers <= 1 or trials < 2 * workers:
        counts = _run_trials(T, P, seed, 0, trials)
    else:
        import multiprocessing as mp

        edges = np.linspace(0, trials, workers + 1).astype(int)
        chunks = [(int(a), int(b)) for a, b in zip(edges, edges[1:])]
        _FORK_JOB = (T, P, seed)
        try:
            with mp.get_context("fork").Pool(workers) as pool:
                parts = pool.map(_fork_worker, chunks)
        finally:
            _FORK_JOB = None
        counts = [sum(col) for col in zip(*parts)]
    freqs = [c / trials for c in counts]
    errs = [math.sqrt(f * (1 - f) / trials) for f in freqs]
    return SimReport(trials, seed, counts, freqs, errs)
