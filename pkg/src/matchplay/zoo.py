"""Concrete tournaments and tournament maps.

Every builder returns an engine :class:`~matchplay.engine.Tournament` (or a
:class:`~matchplay.engine.RoundsTournament`).  Long runs of matches whose
outcome only matters through win counts are written as Blocks, so exact
evaluation and simulation both stay cheap.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .core import (
    HALF,
    DistinctnessError,
    MatchMatrix,
    TournamentMap,
    WinVector,
    as_fraction,
    epsilon_of,
    is_doubly_monotonic,
)
from .engine import Block, Chance, Match, Round, RoundsTournament, Tournament, Winner
from .polytope import Digraph


def _winner_states(weights: dict) -> Chance:
    """Chance node over Winner leaves; zero weights are dropped."""
    return Chance(tuple((w, ("win", k)) for k, w in sorted(weights.items()) if w))


def _round_robin(players, N: int) -> tuple:
    pairs = list(itertools.combinations(players, 2))
    return tuple(pairs) * N


# ---------------------------------------------------------------------------
# three-player tournaments


def make_unfair3(variant: str, N: int) -> Tournament:
    """T1 / T2: exclude one player at random, the other two play N matches.

    A "big win" means at least ceil(3N/4) of the N matches.
    T1: big winner and the excluded player toss a coin, else the two players do.
    T2: the big winner takes the tournament, else the excluded player does.
    """
    variant = variant.upper()
    if variant not in ("T1", "T2"):
        raise ValueError(f"variant must be T1 or T2, not {variant!r}")
    if N < 2:
        raise ValueError("N must be at least 2")
    need = math.ceil(Fraction(3 * N, 4))

    def step(state):
        if state == "start":
            return Chance.uniform([("out", z) for z in (1, 2, 3)])
        tag = state[0]
        if tag == "out":
            z = state[1]
            j, k = (p for p in (1, 2, 3) if p != z)
            return Block(((j, k),) * N, lambda tally, z=z: ("done", z, tally[0]))
        if tag == "done":
            _, z, wj = state
            j, k = (p for p in (1, 2, 3) if p != z)
            big = j if wj >= need else k if N - wj >= need else None
            if variant == "T1":
                pair = (big, z) if big else (j, k)
                return _winner_states({pair[0]: HALF, pair[1]: HALF})
            return Winner(big if big else z)
        return Winner(state[1])

    return Tournament(3, "start", step, N, name=f"{variant.lower()}[N={N}]")


def make_roundrobin_repeat(n: int, N: int, tiebreak: str = "max_uniform") -> Tournament:
    """N round-robins among all players.

    ``max_uniform``: winner uniform among the players with most wins.
    ``min_out_then_coin`` (n = 3): drop a uniform player among those with
    fewest wins, then a fair coin between the other two.
    """
    if n < 2 or N < 1:
        raise ValueError("need n >= 2 and N >= 1")
    if tiebreak not in ("max_uniform", "min_out_then_coin"):
        raise ValueError(f"unknown tiebreak {tiebreak!r}")
    if tiebreak == "min_out_then_coin" and n != 3:
        raise ValueError("min_out_then_coin is defined for 3 players only")
    players = tuple(range(1, n + 1))
    pairs = sorted(itertools.combinations(players, 2))

    def step(state):
        if state == "start":
            return Block(_round_robin(players, N), lambda tally: ("done", tally))
        if state[0] == "win":
            return Winner(state[1])
        wins = {p: 0 for p in players}
        for (a, b), t in zip(pairs, state[1]):
            wins[a] += t
            wins[b] += N - t
        if tiebreak == "max_uniform":
            best = max(wins.values())
            top = [p for p in players if wins[p] == best]
            return Chance.uniform([("win", p) for p in top])
        worst = min(wins.values())
        bottom = [p for p in players if wins[p] == worst]
        branches = []
        for z in bottom:
            for p in players:
                if p != z:
                    branches.append((Fraction(1, 2 * len(bottom)), ("win", p)))
        merged: dict = {}
        for w, s in branches:
            merged[s] = merged.get(s, 0) + w
        return Chance(tuple((w, s) for s, w in sorted(merged.items())))

    name = "rr-max" if tiebreak == "max_uniform" else "rr-min-coin"
    return Tournament(n, "start", step, N * comb(n, 2), name=f"{name}[n={n},N={N}]")


def make_uniform_winner(n: int) -> Tournament:
    """Pick the winner uniformly; no matches are played."""

    def step(state):
        if state == "start":
            return Chance.uniform([("win", k) for k in range(1, n + 1)])
        return Winner(state[1])

    return Tournament(n, "start", step, 0, name=f"uniform[n={n}]")


def make_player_one_wins(n: int) -> Tournament:
    """Player 1 is declared the winner.  Blatantly asymmetric."""
    return Tournament(n, "start", lambda state: Winner(1), 0, name=f"one-wins[n={n}]")


def make_single_elim_random(n: int) -> Tournament:
    """Knockout bracket with a uniformly random seating of the players."""
    if n < 1 or n & (n - 1):
        raise ValueError(f"single elimination needs a power of two, got {n}")

    def step(state):
        if state == "start":
            seatings = itertools.permutations(range(1, n + 1))
            return Chance.uniform([("ko", s, ()) for s in seatings])
        _, alive, won = state
        if len(alive) == 1:
            return Winner(alive[0])
        pos = len(won)
        a, b = alive[2 * pos], alive[2 * pos + 1]

        def after(w):
            res = won + (w,)
            if 2 * len(res) == len(alive):
                return ("ko", res, ())
            return ("ko", alive, res)

        return Match(a, b, after(a), after(b))

    return Tournament(n, "start", step, max(n - 1, 0), name=f"single-elim[n={n}]")


def make_single_match() -> Tournament:
    """Two players, one match, the winner takes the tournament."""

    def step(state):
        if state == "start":
            return Match(1, 2, ("win", 1), ("win", 2))
        return Winner(state[1])

    return Tournament(2, "start", step, 1, name="single-match")


def make_coin_after_match(p_winner=Fraction(9, 10)) -> Tournament:
    """Play one match; afterwards a biased coin picks its winner or its loser."""
    p_winner = as_fraction(p_winner)

    def step(state):
        if state == "start":
            return Match(1, 2, ("played", 1), ("played", 2))
        if state[0] == "played":
            w = state[1]
            return Chance(((p_winner, ("win", w)), (1 - p_winner, ("win", 3 - w))))
        return Winner(state[1])

    return Tournament(2, "start", step, 1, name="coin-after")


def make_coin_before_match(p_winner=Fraction(9, 10)) -> Tournament:
    """As :func:`make_coin_after_match`, but the coin is tossed before the match."""
    p_winner = as_fraction(p_winner)

    def step(state):
        if state == "start":
            return Chance(((p_winner, ("pre", "winner")), (1 - p_winner, ("pre", "loser"))))
        if state[0] == "pre":
            rule = state[1]
            if rule == "winner":
                return Match(1, 2, ("win", 1), ("win", 2))
            return Match(1, 2, ("win", 2), ("win", 1))
        return Winner(state[1])

    return Tournament(2, "start", step, 1, name="coin-before")


# ---------------------------------------------------------------------------
# tournament maps


def uniform_map(n: int) -> TournamentMap:
    return TournamentMap(n, lambda P: WinVector.uniform(n), name=f"uniform-map[n={n}]")


def uniform_strict_map(n: int) -> TournamentMap:
    """h_i(M) = sum_{j != i} m_ij / C(n, 2)."""
    if n < 2:
        raise ValueError("h needs at least two players")
    c = comb(n, 2)

    def h(M: MatchMatrix):
        return [sum(M.rows[i][j] for j in range(n) if j != i) / c for i in range(n)]

    return TournamentMap(n, h, name=f"h[n={n}]")


def strictify_map(g: TournamentMap, eps, n: int | None = None) -> TournamentMap:
    """(1 - eps/2) g + (eps/2) h."""
    eps = as_fraction(eps)
    if not 0 < eps <= 1:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    n = g.n if n is None else n
    h = uniform_strict_map(n)
    a = eps / 2

    def f(P):
        gv, hv = g(P), h(P)
        return [(1 - a) * x + a * y for x, y in zip(gv, hv)]

    return TournamentMap(n, f, name=f"strict({g.name},{eps})")


def empirical_matrix(n: int, N: int, tally: tuple) -> MatchMatrix:
    """Fraction of wins per pair after N round-robins (tally over sorted pairs)."""
    upper = {pq: Fraction(t, N) for pq, t in zip(itertools.combinations(range(1, n + 1), 2), tally)}
    return MatchMatrix.from_upper(n, upper)


def make_map_tournament(f: TournamentMap, n: int, N: int) -> Tournament:
    """N round-robins, then draw the winner from f(empirical matrix)."""
    if N < 1:
        raise ValueError("N must be at least 1")
    if f.n != n:
        raise ValueError(f"map is for {f.n} players, tournament for {n}")
    players = tuple(range(1, n + 1))
    cache: dict = {}

    def step(state):
        if state == "start":
            return Block(_round_robin(players, N), lambda tally: ("done", tally))
        if state[0] == "win":
            return Winner(state[1])
        d = cache.get(state[1])
        if d is None:
            vec = f(empirical_matrix(n, N, state[1]))
            d = _winner_states({k: vec[k - 1] for k in players})
            cache[state[1]] = d
        return d

    return Tournament(n, "start", step, N * comb(n, 2), name=f"map[{f.name},N={N}]")


# ---------------------------------------------------------------------------
# the frugal graph tournaments


def chain4_holds(P: MatchMatrix) -> bool:
    """p14 > p24 > p34 > p13 > p12 > p23."""
    chain = [P[1, 4], P[2, 4], P[3, 4], P[1, 3], P[1, 2], P[2, 3]]
    return all(a > b for a, b in zip(chain, chain[1:]))


def _strict_order_extension(n: int, rng: random.Random) -> list:
    """Random linear extension (smallest first) of the strict doubly monotone order on pairs i < j."""
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    # (i, j) must be smaller than (i, j+1) and than (i-1, j)
    preds = {pq: set() for pq in pairs}
    for i, j in pairs:
        if j + 1 <= n:
            preds[(i, j + 1)].add((i, j))
        if i - 1 >= 1:
            preds[(i - 1, j)].add((i, j))
    order, placed = [], set()
    while len(order) < len(pairs):
        ready = sorted(pq for pq in pairs if pq not in placed and preds[pq] <= placed)
        pick = rng.choice(ready)
        order.append(pick)
        placed.add(pick)
    return order


def default_p_param(n: int, seed: int = 0) -> MatchMatrix:
    """Rule matrix for graph tournaments with the largest possible epsilon.

    The C(n,2) upper entries take the values 1/2 + k/(2m), k = 1..m, so
    epsilon = 1/(4m).  For n = 4 the order is forced by the extra chain
    condition; for n >= 5 it is a seeded random linear extension of the
    strict doubly monotone order.
    """
    if n < 2:
        raise ValueError("need at least two players")
    m = comb(n, 2)
    values = [HALF + Fraction(k, 2 * m) for k in range(1, m + 1)]
    if n == 4:
        order = [(2, 3), (1, 2), (1, 3), (3, 4), (2, 4), (1, 4)]
    else:
        order = _strict_order_extension(n, random.Random(seed))
    return MatchMatrix.from_upper(n, dict(zip(order, values)))


@dataclass(frozen=True)
class GraphTournamentSpec:
    G: Digraph
    P_param: MatchMatrix
    N: int

    def __post_init__(self):
        if self.G.n != self.P_param.n:
            raise ValueError("digraph and rule matrix disagree on n")
        if self.N < 1:
            raise ValueError("N must be at least 1")
        if self.G.n < 4:
            raise ValueError("graph tournaments are built for n >= 4")
        if not is_doubly_monotonic(self.P_param):
            raise ValueError("rule matrix is not doubly monotonic")
        epsilon_of(self.P_param)  # raises DistinctnessError
        if self.G.n == 4 and not chain4_holds(self.P_param):
            raise ValueError("n = 4 rule matrix violates p14 > p24 > p34 > p13 > p12 > p23")


class TokenBudgetExceeded(AssertionError):
    pass


class Identifier:
    """Identification and token qualification for one rule matrix, independent of G.

    ``qualify(z, tally)`` returns, for each remainer that identifies the
    others and plays like row i against them, the triple (player, i, j)
    where i < j are the two labels missing from its identification.
    """

    def __init__(self, P: MatchMatrix, N: int):
        self.P = P
        self.n = P.n
        self.N = N
        self.eps = epsilon_of(P)
        self._lookup = [self._candidates(Fraction(c, N)) for c in range(N + 1)]
        self._cache: dict = {}

    def _candidates(self, q: Fraction):
        hits = [(u, v) for u in range(1, self.n + 1) for v in range(1, self.n + 1)
                if u != v and abs(q - self.P[u, v]) < self.eps]
        if len(hits) > 1:
            raise DistinctnessError(f"q = {q} is within epsilon of several entries {hits}", hits)
        return hits[0] if hits else None

    def qualify(self, z: int, tally: tuple) -> tuple:
        key = (z, tally)
        out = self._cache.get(key)
        if out is not None:
            return out
        n, N = self.n, self.N
        rem = [p for p in range(1, n + 1) if p != z]
        won = {}
        for (a, b), t in zip(itertools.combinations(rem, 2), tally):
            won[(a, b)] = t
            won[(b, a)] = N - t
        res = []
        for A in rem:
            others = [p for p in rem if p != A]
            label = {}
            ok = True
            for a, b in itertools.combinations(others, 2):
                hit = self._lookup[won[(a, b)]]
                if hit is None:
                    ok = False
                    break
                for who, lab in ((a, hit[0]), (b, hit[1])):
                    if label.setdefault(who, lab) != lab:
                        ok = False
                if not ok:
                    break
            if not ok or len(set(label.values())) != len(label):
                continue
            i, j = sorted(set(range(1, n + 1)) - set(label.values()))
            if all(Fraction(won[(A, B)], N) > self.P[i, l] - self.eps for B, l in label.items()):
                res.append((A, i, j))
        out = tuple(res)
        self._cache[key] = out
        return out

    def tokens(self, G: Digraph, z: int, tally: tuple) -> dict:
        """Token weights for the remainers and z; raises if remainer tokens exceed 1."""
        weights = {}
        for A, i, j in self.qualify(z, tally):
            w = Fraction(G.mult(j, i), 2)
            if w:
                weights[A] = w
        s = sum(weights.values())
        if s > 1:
            raise TokenBudgetExceeded(f"remainer tokens sum to {s} (z={z}, tally={tally}, G={G})")
        weights[z] = 1 - s
        return weights


def make_graph_tournament(spec: GraphTournamentSpec) -> Tournament:
    """The frugal tournament T_{G,N} for a digraph G and rule matrix P."""
    G, P, N = spec.G, spec.P_param, spec.N
    n = G.n
    ident = Identifier(P, N)
    cache: dict = {}

    def step(state):
        if state == "start":
            return Chance.uniform([("out", z) for z in range(1, n + 1)])
        tag = state[0]
        if tag == "out":
            z = state[1]
            rem = tuple(p for p in range(1, n + 1) if p != z)
            return Block(_round_robin(rem, N), lambda tally, z=z: ("done", z, tally))
        if tag == "done":
            d = cache.get(state)
            if d is None:
                d = _winner_states(ident.tokens(G, state[1], state[2]))
                cache[state] = d
            return d
        return Winner(state[1])

    return Tournament(n, "start", step, N * comb(n - 1, 2), name=f"graph[n={n},N={N}]")


@dataclass
class TokenAudit:
    n: int
    N: int
    outcomes: int
    graphs: int
    max_total: Fraction
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations and self.max_total <= 1


def token_audit(n: int, N: int, P_param: MatchMatrix | None = None, graphs=None) -> TokenAudit:
    """Exhaustive remainer token totals over every exclusion and every match outcome.

    The rules only read the win counts per pair, so enumerating all tallies
    covers every sequence of match outcomes.
    """
    from .polytope import enumerate_digraphs

    P = default_p_param(n) if P_param is None else P_param
    graphs = enumerate_digraphs(n) if graphs is None else list(graphs)
    ident = Identifier(P, N)
    pairs = comb(n - 1, 2)
    best = Fraction(0)
    bad = []
    outcomes = 0
    mults = [{(j, i): G.mult(j, i) for j in range(1, n + 1) for i in range(1, j)} for G in graphs]
    for z in range(1, n + 1):
        for tally in itertools.product(range(N + 1), repeat=pairs):
            outcomes += 1
            q = ident.qualify(z, tally)
            if not q:
                continue
            for G, m in zip(graphs, mults):
                s = sum((Fraction(m[(j, i)], 2) for _, i, j in q), Fraction(0))
                if s > best:
                    best = s
                if s > 1:
                    bad.append((G, z, tally, s))
    return TokenAudit(n, N, outcomes, len(graphs), best, bad)


# ---------------------------------------------------------------------------
# tournaments with rounds


def make_rounds_example() -> RoundsTournament:
    """Four players in two random pairs play two rounds; a coin then picks the winner.

    Heads looks at the first pair {i, j}: if k and l split their two matches
    the loser of the first i-j match wins, otherwise its winner does.  Tails
    is the same with the pairs swapped.
    """
    pairings = [((1, 2), (3, 4)), ((1, 3), (2, 4)), ((1, 4), (2, 3))]

    def step(state):
        if state == "start":
            return Chance.uniform([("r1", pr) for pr in pairings])
        tag = state[0]
        if tag == "r1":
            pr = state[1]
            return Round(pr, lambda w, pr=pr: ("r2", pr, w))
        if tag == "r2":
            _, pr, first = state
            return Round(pr, lambda w, pr=pr, first=first: ("coin", pr, first, w))
        if tag == "coin":
            _, pr, first, second = state
            picks = []
            for me, other in ((0, 1), (1, 0)):
                a, b = pr[me]
                split = first[other] != second[other]
                w1 = first[me]
                picks.append(("win", (a if w1 == b else b) if split else w1))
            merged: dict = {}
            for s in picks:
                merged[s] = merged.get(s, 0) + HALF
            return Chance(tuple((w, s) for s, w in sorted(merged.items())))
        return Winner(state[1])

    return RoundsTournament(4, "start", step, 2, name="rounds-example")


def make_rounds_loser_wins() -> RoundsTournament:
    """Two players, one round, the loser takes the tournament."""

    def step(state):
        if state == "start":
            return Round(((1, 2),), lambda w: ("win", 3 - w[0]))
        return Winner(state[1])

    return RoundsTournament(2, "start", step, 1, name="rounds-loser-wins")


def make_rounds_knockout4() -> RoundsTournament:
    """Four players: semifinals as one round, then the final; random seating."""
    seatings = [((1, 2), (3, 4)), ((1, 3), (2, 4)), ((1, 4), (2, 3))]

    def step(state):
        if state == "start":
            return Chance.uniform([("semi", s) for s in seatings])
        tag = state[0]
        if tag == "semi":
            return Round(state[1], lambda w: ("final", w))
        if tag == "final":
            a, b = state[1]
            return Round(((a, b),), lambda w: ("win", w[0]))
        return Winner(state[1])

    return RoundsTournament(4, "start", step, 2, name="rounds-knockout4")


# ---------------------------------------------------------------------------
# registry used by the command line


def zoo_names() -> list[str]:
    return ["t1", "t2", "rr-max", "rr-min-coin", "uniform", "single-elim", "map", "graph",
            "rounds-example"]


def build(name: str, n: int | None = None, N: int | None = None, *, digraph: Digraph | None = None,
          p_param: MatchMatrix | None = None, seed: int = 0):
    """Construct a zoo tournament by its command-line name."""
    from .engine import induced_map, sequentialize

    if name in ("t1", "t2"):
        return make_unfair3(name, N or 2)
    if name == "rr-max":
        return make_roundrobin_repeat(n or 3, N or 1, "max_uniform")
    if name == "rr-min-coin":
        return make_roundrobin_repeat(3, N or 1, "min_out_then_coin")
    if name == "uniform":
        return make_uniform_winner(n or 3)
    if name == "single-elim":
        return make_single_elim_random(n or 4)
    if name == "map":
        return make_map_tournament(induced_map(make_unfair3("t1", 2)), 3, N or 2)
    if name == "graph":
        n = n or (digraph.n if digraph else 4)
        if digraph is None:
            digraph = Digraph(n, [(1, 1)] + [(i, i) for i in range(2, n + 1)])
        P = p_param if p_param is not None else default_p_param(n, seed)
        return make_graph_tournament(GraphTournamentSpec(digraph, P, N or 1))
    if name == "rounds-example":
        return sequentialize(make_rounds_example())
    raise ValueError(f"unknown tournament {name!r}; choose from {', '.join(zoo_names())}")
