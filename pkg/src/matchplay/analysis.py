"""Executable versions of symmetry, honesty, fairness and futility, plus maps on a grid.

The checkers are falsifiers: each sample matrix is verified exactly, but a
finite sample cannot prove a property for every matrix, so a clean run is
reported as ``pass-on-samples``.
"""

from __future__ import annotations

import itertools
import random
from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence

from .core import (
    HALF,
    ONE,
    P_STAR,
    ZERO,
    DoublyMonotonicWitness,
    MatchMatrix,
    Permutation,
    TournamentMap,
    WinVector,
    as_fraction,
    fraction_str,
    is_doubly_monotonic,
    permute_matrix,
)
from .engine import (
    Match,
    Round,
    RoundsTournament,
    Tournament,
    evaluate,
    evaluate_rounds,
    exact_win_vector,
    simulate,
)
from .lp import LinearProgram, lp_solve
from .polytope import find_outside

__all__ = [
    "TournamentMap", "PropertyReport", "standard_samples", "check_symmetry", "check_honesty",
    "check_rounds_honesty", "check_fairness", "check_futility", "check_monotonicity",
    "epsilon_distance", "isomorphism_phi", "NotIsomorphicError", "PiecewiseLinear",
    "DiscreteMap", "discrete_map_polytope", "extend_discrete_map", "conjecture_probe",
]


def _jsonable(x):
    if isinstance(x, Fraction):
        return fraction_str(x)
    if isinstance(x, MatchMatrix):
        return x.to_json()
    if isinstance(x, Permutation):
        return list(x.images)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (int, str, bool)) or x is None:
        return x
    return repr(x)


@dataclass
class PropertyReport:
    name: str
    verdict: str
    witnesses: list = field(default_factory=list)
    checked: int = 0

    def __post_init__(self):
        if self.verdict not in ("pass", "fail", "pass-on-samples"):
            raise ValueError(f"bad verdict {self.verdict!r}")
        if self.verdict == "fail" and not self.witnesses:
            raise ValueError("a failing report needs a witness")

    @property
    def passed(self) -> bool:
        return self.verdict != "fail"

    def to_json(self) -> dict:
        return {"property": self.name, "verdict": self.verdict, "checked": self.checked,
                "witnesses": _jsonable(self.witnesses)}


def _report(name, witnesses, checked, vacuous=False) -> PropertyReport:
    if witnesses:
        return PropertyReport(name, "fail", witnesses, checked)
    return PropertyReport(name, "pass" if vacuous else "pass-on-samples", [], checked)


# ---------------------------------------------------------------------------
# sample matrices


def random_interior(n: int, rng: random.Random, den: int = 20) -> MatchMatrix:
    return MatchMatrix.from_upper(n, {
        pq: Fraction(rng.randint(1, den - 1), den) for pq in itertools.combinations(range(1, n + 1), 2)
    })


def random_doubly_monotonic(n: int, rng: random.Random, den: int = 20) -> MatchMatrix:
    """Upper entries are random values in [1/2, 1] placed along a random monotone order."""
    from .zoo import _strict_order_extension

    m = comb(n, 2)
    values = sorted(Fraction(rng.randint(den // 2, den), den) for _ in range(m))
    order = _strict_order_extension(n, rng)
    return MatchMatrix.from_upper(n, dict(zip(order, values)))


def monotone_grid(n: int) -> list[MatchMatrix]:
    """Doubly monotonic matrices whose upper entries are all 1/2 or 1."""
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    out = []
    for vals in itertools.product((HALF, ONE), repeat=len(pairs)):
        P = MatchMatrix.from_upper(n, dict(zip(pairs, vals)))
        if is_doubly_monotonic(P):
            out.append(P)
    return out


SAMPLE_SEED = 20240611


def standard_samples(n: int, seed: int = SAMPLE_SEED, count: int = 10) -> list[MatchMatrix]:
    """Uniform, P* (n = 3), seeded random interior and doubly monotonic matrices, 1/2-or-1 grid (n <= 3)."""
    rng = random.Random(seed * 1000 + n)
    out = [MatchMatrix.uniform(n)]
    if n == 3:
        out.append(P_STAR)
    out += [random_interior(n, rng) for _ in range(count)]
    out += [random_doubly_monotonic(n, rng) for _ in range(count)]
    if n <= 3:
        out += monotone_grid(n)
    seen, uniq = set(), []
    for P in out:
        if P not in seen:
            seen.add(P)
            uniq.append(P)
    return uniq


def monotonic_samples(n: int, seed: int = SAMPLE_SEED) -> list[MatchMatrix]:
    return [P for P in standard_samples(n, seed) if is_doubly_monotonic(P)]


# ---------------------------------------------------------------------------
# property checks on tournaments


def _check_n(T, samples):
    if not samples:
        raise ValueError("need at least one sample matrix")
    for P in samples:
        if P.n != T.n:
            raise ValueError(f"{T.name} has {T.n} players, sample has {P.n}")


def check_symmetry(T: Tournament, samples: Sequence[MatchMatrix]) -> PropertyReport:
    """pi_i(P) = pi_sigma(i)(sigma P) for every sample and every permutation."""
    _check_n(T, samples)
    bad, checked = [], 0
    cache: dict = {}

    def wv(P):
        v = cache.get(P)
        if v is None:
            v = cache[P] = exact_win_vector(T, P).win_vector
        return v

    for P in samples:
        base = wv(P)
        for sigma in Permutation.all(T.n):
            Q = permute_matrix(P, sigma)
            other = wv(Q)
            checked += 1
            for i in range(1, T.n + 1):
                if base.pi(i) != other.pi(sigma(i)):
                    bad.append({"matrix": P, "sigma": sigma, "player": i,
                                "pi": base.pi(i), "pi_renamed": other.pi(sigma(i))})
                    break
            if bad:
                return _report("symmetry", bad, checked)
    return _report("symmetry", bad, checked)


def match_states(T: Tournament, P: MatchMatrix):
    """(evaluation, [(state, Match)]) over states reached with positive probability."""
    ev = evaluate(T, P)
    out = []
    for s in ev.reachable():
        if ev.kinds.get(s) == "match":
            out.append((s, T.decide(s)))
    return ev, out


def _pm(ev, d: Match):
    vi, vj = ev.values[d.if_i_wins], ev.values[d.if_j_wins]
    return {d.i: (vi[d.i - 1], vj[d.i - 1]), d.j: (vj[d.j - 1], vi[d.j - 1])}


def _conditional_scan(T, samples, name, compare, strict_pairs=False):
    _check_n(T, samples)
    bad, checked = [], 0
    any_match = False
    for P in samples:
        ev, states = match_states(T, P)
        any_match |= bool(states)
        met = set()
        for s, d in states:
            checked += 1
            met.add((min(d.i, d.j), max(d.i, d.j)))
            for k, (plus, minus) in _pm(ev, d).items():
                if not compare(plus, minus, P):
                    bad.append({"matrix": P, "state": s, "match": (d.i, d.j), "player": k,
                                "pi_plus": plus, "pi_minus": minus})
                    break
            if bad:
                return _report(name, bad, checked)
        if strict_pairs and P.interior:
            missing = [pq for pq in itertools.combinations(range(1, T.n + 1), 2) if pq not in met]
            if missing:
                bad.append({"matrix": P, "never_meet": missing})
                return _report(name, bad, checked)
    return _report(name, bad, checked, vacuous=not any_match)


def check_honesty(T: Tournament, samples: Sequence[MatchMatrix], strict: bool = False) -> PropertyReport:
    """pi_k(+) >= pi_k(-) for both players at every reachable match.

    ``strict`` demands > on interior samples and that every pair meets.
    """
    if strict:
        def cmp(plus, minus, P):
            return plus > minus if P.interior else plus >= minus
        return _conditional_scan(T, samples, "strict-honesty", cmp, strict_pairs=True)
    return _conditional_scan(T, samples, "honesty", lambda a, b, P: a >= b)


def check_futility(T: Tournament, samples: Sequence[MatchMatrix]) -> PropertyReport:
    """pi_k(+) = pi_k(-) at every reachable match."""
    return _conditional_scan(T, samples, "futility", lambda a, b, P: a == b)


def check_fairness(T: Tournament, samples) -> PropertyReport:
    """Win vector sorted non-increasingly at every doubly monotonic sample."""
    mats = []
    for s in samples:
        w = s if isinstance(s, DoublyMonotonicWitness) else DoublyMonotonicWitness(s)
        if not w.verified:
            raise ValueError(f"sample {w.matrix} is not doubly monotonic")
        mats.append(w.matrix)
    _check_n(T, mats)
    bad = []
    for P in mats:
        v = exact_win_vector(T, P).win_vector
        for i in range(1, T.n):
            if v.pi(i) < v.pi(i + 1):
                bad.append({"matrix": P, "players": (i, i + 1), "pi_i": v.pi(i), "pi_next": v.pi(i + 1)})
                break
    return _report("fairness", bad, len(mats))


def check_rounds_honesty(R: RoundsTournament, samples: Sequence[MatchMatrix]) -> PropertyReport:
    """Honesty given earlier results and the current round's pairings.

    For each reachable round and each pair in it, the pair's result is fixed
    while the other matches of the round follow P.
    """
    _check_n(R, samples)
    bad, checked = [], 0
    any_round = False
    for P in samples:
        ev = evaluate_rounds(R, P)
        for s in ev.reachable():
            if ev.kinds.get(s) != "round":
                continue
            any_round = True
            d: Round = R.step(s)
            for slot, (a, b) in enumerate(d.pairs):
                checked += 1
                cond = {a: [Fraction(0)] * R.n, b: [Fraction(0)] * R.n}
                weight = {a: Fraction(0), b: Fraction(0)}
                for winners in itertools.product(*d.pairs):
                    w = Fraction(1)
                    for t, ((x, y), win) in enumerate(zip(d.pairs, winners)):
                        if t != slot:
                            w *= P[x, y] if win == x else P[y, x]
                    child = ev.values[d.then(tuple(winners))]
                    me = winners[slot]
                    weight[me] += w
                    for k in range(R.n):
                        cond[me][k] += w * child[k]
                for k, other in ((a, b), (b, a)):
                    plus = cond[k][k - 1] / weight[k]
                    minus = cond[other][k - 1] / weight[other]
                    if plus < minus:
                        bad.append({"matrix": P, "state": s, "match": (a, b), "player": k,
                                    "pi_plus": plus, "pi_minus": minus})
                        return _report("rounds-honesty", bad, checked)
    return _report("rounds-honesty", bad, checked, vacuous=not any_round)


def check_monotonicity(T: Tournament, samples: Sequence[MatchMatrix], experiments: int = 50,
                       seed: int = 0) -> PropertyReport:
    """Raising p_kl (and lowering p_lk) never lowers pi_k."""
    rng = random.Random(seed)
    bad = []
    for _ in range(experiments):
        P = rng.choice(list(samples))
        k, l = rng.sample(range(1, T.n + 1), 2)
        room = 1 - P[k, l]
        if room == 0:
            continue
        bump = room * Fraction(rng.randint(1, 4), 4)
        Q = MatchMatrix.from_upper(T.n, {**P.upper(), (min(k, l), max(k, l)):
                                         (P[k, l] + bump) if k < l else 1 - (P[k, l] + bump)})
        a = exact_win_vector(T, P).win_vector.pi(k)
        b = exact_win_vector(T, Q).win_vector.pi(k)
        if b < a:
            bad.append({"matrix": P, "raised": (k, l), "to": Q[k, l], "before": a, "after": b})
    return _report("monotonicity", bad, experiments)


def _vector(T, P, trials, seed):
    if trials:
        rep = simulate(T, P, trials, seed)
        return [Fraction(c, trials) for c in rep.counts]
    return list(exact_win_vector(T, P).win_vector)


def epsilon_distance(Ta, Tb, samples: Sequence[MatchMatrix], trials_a: int | None = None,
                     trials_b: int | None = None, seed: int = 0) -> Fraction:
    """max over samples and players of |pi_i(Ta, P) - pi_i(Tb, P)|.

    Either side may be estimated by simulation instead of exact evaluation
    by passing a trial count; the result is then an estimate.
    """
    if Ta.n != Tb.n:
        raise ValueError("tournaments have different player counts")
    worst = Fraction(0)
    for idx, P in enumerate(samples):
        a = _vector(Ta, P, trials_a, seed + idx)
        b = _vector(Tb, P, trials_b, seed + idx)
        worst = max(worst, max(abs(x - y) for x, y in zip(a, b)))
    return worst


def conjecture_probe(vectors: Iterable, n: int) -> list:
    """Achieved vectors lying outside A*_n; a non-empty result would refute A*_n = A_n."""
    return find_outside(vectors, n)


# ---------------------------------------------------------------------------
# isomorphic matrices


class NotIsomorphicError(ValueError):
    def __init__(self, message: str, witness):
        super().__init__(message)
        self.witness = witness


class PiecewiseLinear:
    """Increasing piecewise-linear map of [0, 1] through the given breakpoints."""

    def __init__(self, xs: Sequence[Fraction], ys: Sequence[Fraction]):
        self.xs = list(xs)
        self.ys = list(ys)

    def __call__(self, x) -> Fraction:
        x = as_fraction(x)
        k = bisect_left(self.xs, x)
        if k < len(self.xs) and self.xs[k] == x:
            return self.ys[k]
        if k == 0 or k == len(self.xs):
            raise ValueError(f"{x} outside [0, 1]")
        x0, x1, y0, y1 = self.xs[k - 1], self.xs[k], self.ys[k - 1], self.ys[k]
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    def apply(self, P: MatchMatrix) -> MatchMatrix:
        return MatchMatrix([[self(v) for v in row] for row in P.rows])

    def breakpoints(self) -> list[tuple[Fraction, Fraction]]:
        return list(zip(self.xs, self.ys))


def isomorphism_phi(P: MatchMatrix, Q: MatchMatrix) -> PiecewiseLinear:
    """The increasing piecewise-linear phi with phi(P) = Q entrywise, phi(0) = 0, phi(1) = 1."""
    if P.n != Q.n:
        raise ValueError("matrices have different sizes")
    n = P.n
    cells = [(i, j) for i in range(n) for j in range(n)]
    pmap: dict = {}
    for i, j in cells:
        p, q = P.rows[i][j], Q.rows[i][j]
        if pmap.setdefault(p, q) != q:
            raise NotIsomorphicError(f"value {p} maps to both {pmap[p]} and {q}", (p, pmap[p], q))
    pairs = sorted(pmap.items())
    for (p0, q0), (p1, q1) in zip(pairs, pairs[1:]):
        if not q0 < q1:
            raise NotIsomorphicError(f"order flips: {p0} < {p1} but {q0} >= {q1}", (p0, p1, q0, q1))
    for end in (ZERO, ONE):
        if (end in pmap and pmap[end] != end) or (end not in pmap and end in pmap.values()):
            raise NotIsomorphicError(f"the value {end} must correspond to itself", (end,))
    pmap.setdefault(ZERO, ZERO)
    pmap.setdefault(ONE, ONE)
    xs = sorted(pmap)
    phi = PiecewiseLinear(xs, [pmap[x] for x in xs])
    for x in xs:
        if phi(1 - x) != 1 - phi(x):
            raise AssertionError(f"phi(1 - {x}) != 1 - phi({x})")
    return phi


# ---------------------------------------------------------------------------
# P-discrete maps


def levels(P: MatchMatrix) -> list[Fraction]:
    """B_P: the entries of P together with 0 and 1, sorted."""
    return sorted(P.values() | {ZERO, ONE})


def grid_matrices(P: MatchMatrix, limit: int = 10_000) -> list[MatchMatrix]:
    B = levels(P)
    pairs = list(itertools.combinations(range(1, P.n + 1), 2))
    size = len(B) ** len(pairs)
    if size > limit:
        raise ValueError(f"the grid has {size} matrices, above the guard {limit}")
    return [MatchMatrix.from_upper(P.n, dict(zip(pairs, vals)))
            for vals in itertools.product(B, repeat=len(pairs))]


@dataclass
class DiscreteMap:
    P_base: MatchMatrix
    table: dict

    def __post_init__(self):
        expected = set(grid_matrices(self.P_base))
        if set(self.table) != expected:
            raise ValueError("table must cover exactly the grid of the base matrix")
        self.table = {Q: WinVector(v) for Q, v in self.table.items()}

    def __call__(self, Q: MatchMatrix) -> WinVector:
        return self.table[Q]

    @classmethod
    def from_map(cls, P_base: MatchMatrix, f) -> "DiscreteMap":
        return cls(P_base, {Q: f(Q) for Q in grid_matrices(P_base)})


class MapPolytope:
    """Linear system for symmetric, honest P-discrete maps, one variable per orbit of (Q, i)."""

    def __init__(self, P: MatchMatrix, limit: int = 10_000):
        self.P = P
        self.n = n = P.n
        self.levels = levels(P)
        self.grid = grid_matrices(P, limit)
        perms = list(Permutation.all(n))
        self.var: dict = {}
        self.orbits = 0
        for Q in self.grid:
            for i in range(1, n + 1):
                if (Q, i) in self.var:
                    continue
                for s in perms:
                    self.var.setdefault((permute_matrix(Q, s), s(i)), self.orbits)
                self.orbits += 1
        rows = {}
        for Q in self.grid:
            row: dict = {}
            for i in range(1, n + 1):
                k = self.var[(Q, i)]
                row[k] = row.get(k, 0) + 1
            rows[tuple(sorted(row.items()))] = row
        self.dist_rows = list(rows.values())
        pos = {b: t for t, b in enumerate(self.levels)}
        mono = set()
        for Q in self.grid:
            for i in range(1, n + 1):
                for j in range(1, n + 1):
                    if i == j:
                        continue
                    t = pos[Q[i, j]]
                    if t + 1 == len(self.levels):
                        continue
                    up = dict(Q.upper())
                    key = (min(i, j), max(i, j))
                    new = self.levels[t + 1]
                    up[key] = new if i < j else 1 - new
                    R = MatchMatrix.from_upper(n, up)
                    a, b = self.var[(Q, i)], self.var[(R, i)]
                    if a != b:
                        mono.add((a, b))
        self.mono = sorted(mono)

    def program(self) -> LinearProgram:
        lp = LinearProgram(self.orbits)
        for row in self.dist_rows:
            lp.add_eq(row, 1)
        for a, b in self.mono:
            lp.add_le({a: 1, b: -1}, 0)
        return lp

    def optimize(self, objective, maximize: bool = True, at: MatchMatrix | None = None):
        """Optimize sum_i c_i f_i(at) (default at = P); returns (value, DiscreteMap)."""
        at = self.P if at is None else at
        coeffs = [as_fraction(c) for c in objective]
        lp = self.program()
        obj: dict = {}
        for i, c in enumerate(coeffs, start=1):
            k = self.var[(at, i)]
            obj[k] = obj.get(k, 0) + c
        lp.set_objective(obj, maximize)
        res = lp_solve(lp)
        if not res.optimal:
            raise RuntimeError(f"map polytope LP is {res.status}")
        return res.value, self._map(res.x)

    def _map(self, x) -> DiscreteMap:
        return DiscreteMap(self.P, {Q: [x[self.var[(Q, i)]] for i in range(1, self.n + 1)]
                                    for Q in self.grid})

    def contains(self, f: DiscreteMap) -> bool:
        """True when f is symmetric and satisfies the distribution and honesty rows."""
        x = [None] * self.orbits
        for (Q, i), k in self.var.items():
            v = f(Q).pi(i)
            if x[k] is None:
                x[k] = v
            elif x[k] != v:
                return False
        return all(x[a] <= x[b] for a, b in self.mono)

    def contains_vector(self, v) -> bool:
        """Is v = f(P) for some symmetric honest P-discrete map f?"""
        lp = self.program()
        for i, c in enumerate(v, start=1):
            lp.add_eq({self.var[(self.P, i)]: 1}, as_fraction(c))
        return lp_solve(lp).optimal


def discrete_map_polytope(P: MatchMatrix, limit: int = 10_000) -> MapPolytope:
    return MapPolytope(P, limit)


def extend_discrete_map(f: DiscreteMap, Q: MatchMatrix) -> WinVector:
    """E f(R) where each q_ij is rounded at random to its neighbouring levels, preserving the mean."""
    B = levels(f.P_base)
    n = Q.n
    choices = []
    for (i, j), q in Q.upper().items():
        k = bisect_left(B, q)
        if B[k] == q:
            choices.append([((i, j), q, Fraction(1))])
            continue
        lo, hi = B[k - 1], B[k]
        w_lo = (hi - q) / (hi - lo)
        choices.append([((i, j), lo, w_lo), ((i, j), hi, 1 - w_lo)])
    acc = [Fraction(0)] * n
    for combo in itertools.product(*choices):
        w = Fraction(1)
        up = {}
        for pq, val, p in combo:
            w *= p
            up[pq] = val
        v = f(MatchMatrix.from_upper(n, up))
        for t in range(n):
            acc[t] += w * v[t]
    return WinVector(acc)

