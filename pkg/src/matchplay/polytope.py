"""The digraph family G_n, graph vectors, corners and membership tests for A*_n.

A digraph in G_n sends exactly two arcs out of every vertex, each to a vertex
with a label no larger than its own; two parallel arcs are allowed only as a
double loop or into vertex 1.  Its graph vector gives vertex ``i`` weight
indeg(i) / (2n).  A*_n is the convex hull of these vectors.

Two independent LP formulations decide membership in A*_n: convex
combinations of the corners, and fractional arc flows.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
from collections import Counter
from fractions import Fraction
from functools import lru_cache
from math import comb, prod
from typing import Iterable, Sequence

from .core import Permutation, WinVector, as_fraction, fraction_str
from .lp import LinearProgram, lp_solve

MAX_DIGRAPH_N = 7
MAX_CORNER_N = 12


class Digraph:
    """A member of G_n stored as the (sorted) pair of out-targets of each vertex."""

    __slots__ = ("n", "targets")

    def __init__(self, n: int, targets: Sequence[Sequence[int]]):
        targets = tuple(tuple(sorted(int(t) for t in pair)) for pair in targets)
        if len(targets) != n:
            raise ValueError(f"need out-arcs for {n} vertices, got {len(targets)}")
        for i, pair in enumerate(targets, start=1):
            if len(pair) != 2:
                raise ValueError(f"vertex {i} has out-degree {len(pair)}, must be 2")
            for t in pair:
                if not 1 <= t <= i:
                    raise ValueError(f"arc ({i}, {t}) points to a higher label")
            if pair[0] == pair[1] and pair[0] not in (1, i):
                raise ValueError(f"vertex {i} sends both arcs to {pair[0]}")
        self.n = n
        self.targets = targets

    @classmethod
    def from_arcs(cls, n: int, arcs: Iterable[Sequence[int]]) -> "Digraph":
        """Build from ``[(i, j, multiplicity), ...]``."""
        out: dict[int, list[int]] = {i: [] for i in range(1, n + 1)}
        for i, j, mult in arcs:
            if not 1 <= i <= n:
                raise ValueError(f"arc tail {i} is not a vertex")
            out[i].extend([j] * int(mult))
        return cls(n, [out[i] for i in range(1, n + 1)])

    def arcs(self) -> list[tuple[int, int, int]]:
        """Sorted ``(tail, head, multiplicity)`` triples."""
        c = Counter((i, t) for i, pair in enumerate(self.targets, start=1) for t in pair)
        return sorted((i, j, m) for (i, j), m in c.items())

    def mult(self, i: int, j: int) -> int:
        """Number of arcs from ``i`` to ``j``."""
        return self.targets[i - 1].count(j)

    def indegree(self, j: int) -> int:
        return sum(pair.count(j) for pair in self.targets)

    def outdegree(self, i: int) -> int:
        return len(self.targets[i - 1])

    def to_json(self) -> dict:
        return {"n": self.n, "arcs": [list(a) for a in self.arcs()]}

    @classmethod
    def from_json(cls, data) -> "Digraph":
        if isinstance(data, (str, bytes)):
            data = json.loads(data)
        return cls.from_arcs(data["n"], data["arcs"])

    def __eq__(self, other):
        return isinstance(other, Digraph) and self.targets == other.targets

    def __hash__(self):
        return hash(self.targets)

    def __repr__(self):
        return f"Digraph(n={self.n}, arcs={self.arcs()})"


def digraph_count(n: int) -> int:
    return prod(2 + comb(i, 2) for i in range(2, n + 1))


def _out_options(i: int) -> list[tuple[int, int]]:
    if i == 1:
        return [(1, 1)]
    opts = [(1, 1), (i, i)]
    opts += list(itertools.combinations(range(1, i + 1), 2))
    return opts


def enumerate_digraphs(n: int, max_n: int = MAX_DIGRAPH_N) -> list[Digraph]:
    """All of G_n, in lexicographic order of the per-vertex choices."""
    if not 1 <= n <= max_n:
        raise ValueError(f"n={n} outside the enumeration guard 1..{max_n}")
    options = [_out_options(i) for i in range(1, n + 1)]
    return [Digraph(n, choice) for choice in itertools.product(*options)]


def graph_vector(G: Digraph) -> WinVector:
    """v_i = indeg(i) / (2n), cross-checked against 1/n + (indeg - outdeg)/(2n)."""
    n = G.n
    indeg = [0] * n
    for pair in G.targets:
        for t in pair:
            indeg[t - 1] += 1
    v = [Fraction(d, 2 * n) for d in indeg]
    alt = [Fraction(1, n) + Fraction(indeg[i] - G.outdegree(i + 1), 2 * n) for i in range(n)]
    if v != alt:
        raise AssertionError(f"in/out degree identity fails for {G}")
    return WinVector(v)


def sigma_to_digraph(sigma, n: int | None = None) -> Digraph:
    """Greedy digraph: route as many arcs as the rules allow to sigma_1, then sigma_2, ...

    ``sigma`` may be a full :class:`Permutation`, a sequence of images, or a
    corner sequence ending in 1 (``n`` must then be given if it omits labels).
    """
    seq = list(sigma.images) if isinstance(sigma, Permutation) else [int(s) for s in sigma]
    if n is None:
        n = max(seq)
    if len(set(seq)) != len(seq) or not all(1 <= s <= n for s in seq):
        raise ValueError(f"{seq} is not a sequence of distinct labels in 1..{n}")
    left = [2] * (n + 1)
    chosen: list[list[int]] = [[] for _ in range(n + 1)]
    for t in seq:
        for i in range(t, n + 1):
            if not left[i]:
                continue
            take = left[i] if t in (1, i) else 1
            chosen[i].extend([t] * take)
            left[i] -= take
    if any(left[1:]):
        raise ValueError(f"sequence {seq} leaves arcs unassigned (it must reach 1)")
    return Digraph(n, chosen[1:])


def _corner_ok(prefix: Sequence[int], x: int) -> bool:
    return sum(1 for p in prefix if p < x) <= 1


class CornerSequence(tuple):
    """Distinct labels ending in 1; each entry exceeds at most one earlier entry."""

    def __new__(cls, seq, n: int | None = None):
        seq = tuple(int(s) for s in seq)
        n = max(seq) if n is None else n
        if not seq or seq[-1] != 1:
            raise ValueError(f"{seq} does not end in 1")
        if len(set(seq)) != len(seq) or not all(1 <= s <= n for s in seq):
            raise ValueError(f"{seq} is not a sequence of distinct labels in 1..{n}")
        for k, x in enumerate(seq):
            if not _corner_ok(seq[:k], x):
                raise ValueError(f"entry {x} of {seq} exceeds two earlier entries")
        obj = super().__new__(cls, seq)
        obj.n = n
        return obj


def corner_sequences(n: int, max_n: int = MAX_CORNER_N) -> list[CornerSequence]:
    """Sequences of distinct labels ending in 1 where each entry exceeds at most one earlier entry."""
    if not 1 <= n <= max_n:
        raise ValueError(f"n={n} outside the corner guard 1..{max_n}")
    out = []

    def grow(prefix: list[int], used: set[int]):
        out.append(tuple(prefix) + (1,))
        for x in range(2, n + 1):
            if x not in used and _corner_ok(prefix, x):
                prefix.append(x)
                used.add(x)
                grow(prefix, used)
                used.remove(x)
                prefix.pop()

    grow([], set())
    return [CornerSequence(s, n) for s in sorted(out)]


def corner_count(n: int) -> int:
    return (3 ** (n - 1) + 1) // 2


@lru_cache(maxsize=None)
def _corners(n: int) -> tuple[WinVector, ...]:
    seen = {}
    for seq in corner_sequences(n):
        v = graph_vector(sigma_to_digraph(seq, n))
        seen.setdefault(v, seq)
    return tuple(seen)


def corners(n: int) -> list[WinVector]:
    """Distinct corner vectors of A*_n, one per corner sequence."""
    return list(_corners(n))


def corner_table(n: int) -> list[dict]:
    """Rows (sigma class, arcs, vector) over all permutations, grouped by digraph."""
    groups: dict[Digraph, list] = {}
    for perm in itertools.permutations(range(1, n + 1)):
        G = sigma_to_digraph(perm, n)
        groups.setdefault(G, []).append(perm)
    rows = []
    for G, perms in groups.items():
        rows.append({"sigmas": perms, "arcs": G.arcs(), "vector": graph_vector(G)})
    return rows


def corner_table_csv(n: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["sigma", "arcs", "vector"])
    for row in corner_table(n):
        w.writerow([
            " or ".join("(" + ",".join(map(str, s)) + ")" for s in row["sigmas"]),
            " ".join(f"{i}->{j}x{m}" for i, j, m in row["arcs"]),
            " ".join(fraction_str(x) for x in row["vector"]),
        ])
    return buf.getvalue()


def _as_vector(x) -> list[Fraction]:
    v = [as_fraction(c) for c in x]
    if any(c < 0 for c in v) or sum(v) != 1:
        raise ValueError(f"{x} is not a probability vector")
    return v


class ArcFlow:
    """Lower-triangular matrix m with m_ij <= 1/2 off {1, i} and unit row sums."""

    def __init__(self, m: Sequence[Sequence[Fraction]]):
        self.m = [list(map(as_fraction, row)) for row in m]
        self.n = len(self.m)
        self.check()

    def check(self) -> None:
        n = self.n
        for i in range(1, n + 1):
            row = self.m[i - 1]
            if sum(row) != 1:
                raise ValueError(f"row {i} of the flow sums to {sum(row)}")
            for j in range(1, n + 1):
                v = row[j - 1]
                if v < 0:
                    raise ValueError(f"m_{i}{j} < 0")
                if j > i and v != 0:
                    raise ValueError(f"m_{i}{j} must vanish above the diagonal")
                if j not in (1, i) and v > Fraction(1, 2):
                    raise ValueError(f"m_{i}{j} > 1/2")

    def vector(self) -> list[Fraction]:
        n = self.n
        return [sum(self.m[i][j] for i in range(n)) / n for j in range(n)]


def _arc_flow_lp(n: int) -> tuple[LinearProgram, dict]:
    col = {}
    for i in range(1, n + 1):
        for j in range(1, i + 1):
            col[(i, j)] = len(col)
    lp = LinearProgram(len(col))
    for i in range(1, n + 1):
        lp.add_eq({col[(i, j)]: 1 for j in range(1, i + 1)}, 1)
        for j in range(2, i):
            lp.add_le({col[(i, j)]: 1}, Fraction(1, 2))
    return lp, col


def arc_flow_program(x) -> tuple[LinearProgram, dict]:
    """The feasibility LP behind :func:`arc_flow_membership`; columns keyed by arc (i, j)."""
    v = _as_vector(x)
    n = len(v)
    lp, col = _arc_flow_lp(n)
    for j in range(1, n + 1):
        lp.add_eq({col[(i, j)]: 1 for i in range(j, n + 1)}, n * v[j - 1])
    return lp, col


def arc_flow_membership(x) -> tuple[bool, object]:
    """Decide x in A*_n by finding a fractional arc flow with column means x.

    Returns ``(True, ArcFlow)`` or ``(False, LPResult)`` whose Farkas
    multipliers certify infeasibility.
    """
    lp, col = arc_flow_program(x)
    n = len(x)
    res = lp_solve(lp)
    if res.status != "optimal":
        return False, res
    m = [[Fraction(0)] * n for _ in range(n)]
    for (i, j), k in col.items():
        m[i - 1][j - 1] = res.x[k]
    return True, ArcFlow(m)


def hull_membership(x, n: int | None = None) -> tuple[bool, object]:
    """Decide x in conv(corners(n)); witness is ``{corner: weight}`` or the LP certificate."""
    v = _as_vector(x)
    n = len(v) if n is None else n
    if len(v) != n:
        raise ValueError(f"vector of length {len(v)} tested against A*_{n}")
    cs = corners(n)
    lp = LinearProgram(len(cs))
    lp.add_eq({k: 1 for k in range(len(cs))}, 1)
    for j in range(n):
        lp.add_eq({k: c[j] for k, c in enumerate(cs)}, v[j])
    res = lp_solve(lp)
    if res.status != "optimal":
        return False, res
    return True, {cs[k]: w for k, w in enumerate(res.x) if w}


def linf_distance(x, n: int | None = None) -> Fraction:
    """Exact l-infinity distance from the rational point x to A*_n."""
    v = [as_fraction(c) for c in x]
    n = len(v) if n is None else n
    cs = corners(n)
    t = len(cs)
    lp = LinearProgram(t + 1, {t: 1}, maximize=False)
    lp.add_eq({k: 1 for k in range(t)}, 1)
    for j in range(n):
        row = {k: c[j] for k, c in enumerate(cs)}
        lp.add_le({**row, t: -1}, v[j])
        lp.add_ge({**{k: c for k, c in row.items()}, t: 1}, v[j])
    res = lp_solve(lp)
    return res.value


def is_vertex(c: WinVector, n: int) -> bool:
    """True when ``c`` is not a convex combination of the other corners."""
    others = [d for d in corners(n) if d != c]
    lp = LinearProgram(len(others))
    lp.add_eq({k: 1 for k in range(len(others))}, 1)
    for j in range(n):
        lp.add_eq({k: d[j] for k, d in enumerate(others)}, c[j])
    return lp_solve(lp).status == "infeasible"


def max_linear(u: Sequence, n: int) -> tuple[Fraction, Fraction]:
    """max u.v over arc-flow vectors and over corners; the two must agree."""
    u = [as_fraction(a) for a in u]
    lp, col = _arc_flow_lp(n)
    lp.set_objective({k: u[j - 1] for (i, j), k in col.items()}, maximize=True)
    res = lp_solve(lp)
    flow_best = res.value / n
    corner_best = max(sum(a * c for a, c in zip(u, cv)) for cv in corners(n))
    return flow_best, corner_best


def find_outside(vectors: Iterable, n: int) -> list:
    """Vectors not in A*_n: counterexamples to A*_n = A_n if any were achieved."""
    return [x for x in vectors if not hull_membership(x, n)[0]]
