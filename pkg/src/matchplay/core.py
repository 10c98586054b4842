"""Exact match matrices, win vectors and permutations.

Players are numbered 1..n everywhere in the public API.  Internally matrices
are stored as tuples of tuples of :class:`fractions.Fraction` with 0-based
indices, so ``P[i, j]`` with 1-based ``i, j`` is the usual accessor.
"""

from __future__ import annotations

import itertools
import json
from decimal import Decimal
from fractions import Fraction
from typing import Callable, Iterable, Sequence

HALF = Fraction(1, 2)
ZERO = Fraction(0)
ONE = Fraction(1)


class MatrixError(ValueError):
    """A raw matrix is not a member of M_n.  ``cell`` is the 1-based (i, j)."""

    def __init__(self, message: str, cell: tuple[int, int] | None = None):
        super().__init__(message)
        self.cell = cell


class DistinctnessError(ValueError):
    """Off-diagonal entries collide, so the identification margin is undefined."""

    def __init__(self, message: str, collisions):
        super().__init__(message)
        self.collisions = collisions


def as_fraction(value) -> Fraction:
    """Convert an int, Fraction, or string ("3/4", "0.75") to a Fraction exactly.

    Floats are refused: they rarely carry the value the caller meant.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not probabilities")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Decimal):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            return Fraction(text)
        return Fraction(Decimal(text))
    raise TypeError(f"cannot convert {type(value).__name__} exactly to a rational")


def fraction_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


class Permutation:
    """A bijection on {1..n}; ``sigma(i)`` is the new name of player ``i``."""

    __slots__ = ("images",)

    def __init__(self, images: Sequence[int]):
        images = tuple(int(v) for v in images)
        if sorted(images) != list(range(1, len(images) + 1)):
            raise ValueError(f"{images} is not a permutation of 1..{len(images)}")
        self.images = images

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, v in enumerate(self.images, start=1):
            inv[v - 1] = i
        return Permutation(inv)

    def compose(self, other: "Permutation") -> "Permutation":
        """Return ``self ∘ other``."""
        return Permutation([self(other(i)) for i in range(1, self.n + 1)])

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(range(1, n + 1))

    @classmethod
    def swap(cls, n: int, a: int, b: int) -> "Permutation":
        images = list(range(1, n + 1))
        images[a - 1], images[b - 1] = b, a
        return cls(images)

    @classmethod
    def all(cls, n: int) -> Iterable["Permutation"]:
        for images in itertools.permutations(range(1, n + 1)):
            yield cls(images)

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return f"Permutation({self.images})"


class MatchMatrix:
    """A validated member of M_n: p_ii = 1/2 and p_ij + p_ji = 1.

    Construct through :func:`validate_match_matrix` or the helpers below; the
    constructor validates as well, so every instance is well formed.
    """

    __slots__ = ("rows", "_hash")

    def __init__(self, raw):
        rows = tuple(tuple(as_fraction(v) for v in row) for row in raw)
        _check_rows(rows)
        self.rows = rows
        self._hash = hash(rows)

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def interior(self) -> bool:
        """True when no off-diagonal entry is 0 or 1."""
        return all(
            self.rows[i][j] not in (ZERO, ONE)
            for i in range(self.n)
            for j in range(self.n)
            if i != j
        )

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        if not (1 <= i <= self.n and 1 <= j <= self.n):
            raise IndexError(f"player index {ij} out of range for n={self.n}")
        return self.rows[i - 1][j - 1]

    def upper(self) -> dict[tuple[int, int], Fraction]:
        """Map each pair i < j to p_ij."""
        return {
            (i, j): self.rows[i - 1][j - 1]
            for i in range(1, self.n + 1)
            for j in range(i + 1, self.n + 1)
        }

    def values(self) -> set[Fraction]:
        return {v for row in self.rows for v in row}

    def row_clones(self, i: int, j: int) -> bool:
        """Players i and j are indistinguishable: p_ik = p_jk for every k."""
        return all(self[i, k] == self[j, k] for k in range(1, self.n + 1))

    @classmethod
    def from_upper(cls, n: int, upper) -> "MatchMatrix":
        """Build from a mapping {(i, j): p_ij} over pairs i < j (1-based)."""
        rows = [[HALF] * n for _ in range(n)]
        for (i, j), p in upper.items():
            if i == j:
                raise MatrixError("diagonal entries are fixed at 1/2", (i, j))
            if i > j:
                i, j, p = j, i, 1 - as_fraction(p)
            p = as_fraction(p)
            rows[i - 1][j - 1] = p
            rows[j - 1][i - 1] = 1 - p
        return cls(rows)

    @classmethod
    def uniform(cls, n: int) -> "MatchMatrix":
        return cls([[HALF] * n for _ in range(n)])

    def to_json(self) -> dict:
        return {"n": self.n, "p": [[fraction_str(v) for v in row] for row in self.rows]}

    @classmethod
    def from_json(cls, data) -> "MatchMatrix":
        if isinstance(data, (str, bytes)):
            data = json.loads(data)
        p = data["p"]
        if len(p) != data["n"]:
            raise MatrixError(f"declared n={data['n']} but {len(p)} rows given")
        return validate_match_matrix(p)

    def __eq__(self, other):
        return isinstance(other, MatchMatrix) and self.rows == other.rows

    def __hash__(self):
        return self._hash

    def __repr__(self):
        body = ", ".join(f"p{i}{j}={fraction_str(v)}" for (i, j), v in self.upper().items())
        return f"MatchMatrix(n={self.n}: {body})"


def _check_rows(rows) -> None:
    n = len(rows)
    if n < 1:
        raise MatrixError("a match matrix needs at least one player")
    for i, row in enumerate(rows):
        if len(row) != n:
            raise MatrixError(f"row {i + 1} has {len(row)} entries, expected {n}")
    for i in range(n):
        for j in range(n):
            v = rows[i][j]
            if not ZERO <= v <= ONE:
                raise MatrixError(f"p_{i + 1}{j + 1} = {v} is outside [0, 1]", (i + 1, j + 1))
            if i == j and v != HALF:
                raise MatrixError(f"diagonal p_{i + 1}{i + 1} = {v} must be 1/2", (i + 1, i + 1))
            if v + rows[j][i] != ONE:
                raise MatrixError(
                    f"p_{i + 1}{j + 1} + p_{j + 1}{i + 1} = {v + rows[j][i]} != 1",
                    (i + 1, j + 1),
                )


def validate_match_matrix(raw) -> MatchMatrix:
    """Validate a square array of rationals; raise :class:`MatrixError` on the first bad cell."""
    if isinstance(raw, MatchMatrix):
        return raw
    return MatchMatrix(raw)


def is_doubly_monotonic(P: MatchMatrix) -> bool:
    """Rows non-decreasing left to right, columns non-increasing top to bottom."""
    n = P.n
    for i in range(n):
        for j in range(n - 1):
            if P.rows[i][j] > P.rows[i][j + 1]:
                return False
    for j in range(n):
        for i in range(n - 1):
            if P.rows[i][j] < P.rows[i + 1][j]:
                return False
    return True


def is_strictly_doubly_monotonic(P: MatchMatrix) -> bool:
    n = P.n
    return all(
        P.rows[i][j] < P.rows[i][j + 1] for i in range(n) for j in range(n - 1)
    ) and all(P.rows[i][j] > P.rows[i + 1][j] for j in range(n) for i in range(n - 1))


class DoublyMonotonicWitness:
    """A match matrix together with the outcome of the double-monotonicity check."""

    __slots__ = ("matrix", "verified")

    def __init__(self, matrix: MatchMatrix):
        self.matrix = matrix
        self.verified = is_doubly_monotonic(matrix)

    def __repr__(self):
        return f"DoublyMonotonicWitness({self.matrix!r}, verified={self.verified})"


def permute_matrix(P: MatchMatrix, sigma: Permutation) -> MatchMatrix:
    """Rename players: the result Q has q_{σ(i)σ(j)} = p_ij."""
    if sigma.n != P.n:
        raise ValueError(f"permutation on {sigma.n} points applied to {P.n}-player matrix")
    n = P.n
    rows = [[HALF] * n for _ in range(n)]
    for i in range(n):
        si = sigma.images[i] - 1
        for j in range(n):
            rows[si][sigma.images[j] - 1] = P.rows[i][j]
    return MatchMatrix(rows)


def buff_to(P: MatchMatrix, i: int, j: int) -> MatchMatrix:
    """Make player ``i`` a clone of player ``j``.

    Row ``i`` copies row ``j`` off {i, j} and p_ij becomes 1/2; only row and
    column ``i`` change.  Whether this buffs or nerfs ``i`` depends on who
    ``j`` is.
    """
    if i == j:
        raise ValueError("cannot buff a player to itself")
    n = P.n
    rows = [list(r) for r in P.rows]
    for k in range(1, n + 1):
        if k in (i, j):
            continue
        rows[i - 1][k - 1] = P[j, k]
        rows[k - 1][i - 1] = 1 - P[j, k]
    rows[i - 1][j - 1] = HALF
    rows[j - 1][i - 1] = HALF
    return MatchMatrix(rows)


def nerf_to(P: MatchMatrix, i: int, j: int) -> MatchMatrix:
    """Alias of :func:`buff_to` for the direction where ``j`` is the weaker player."""
    return buff_to(P, i, j)


def epsilon_of(P: MatchMatrix) -> Fraction:
    """Half the smallest gap among {1/2} and the off-diagonal values of P.

    Every unordered pair {i, j} contributes the single value max(p_ij, p_ji);
    two different pairs must not share a value and no pair may sit at 1/2.
    """
    upper = {}
    for (i, j), p in P.upper().items():
        upper[(i, j)] = max(p, 1 - p)
    collisions = []
    by_value: dict[Fraction, list] = {}
    for pair, v in upper.items():
        if v == HALF:
            collisions.append((pair, "1/2"))
        by_value.setdefault(v, []).append(pair)
    for v, pairs in by_value.items():
        if len(pairs) > 1:
            collisions.append(tuple(pairs))
    if collisions:
        raise DistinctnessError(f"off-diagonal values are not distinct: {collisions}", collisions)
    if not upper:
        raise DistinctnessError("a 1-player matrix has no off-diagonal entries", [])
    eps1 = min(v - HALF for v in upper.values())
    values = sorted(upper.values())
    gaps = [b - a for a, b in zip(values, values[1:])]
    # |p_ij - p_kl| over oriented entries also includes p_ij vs 1 - p_kl,
    # whose distance is at least 2*eps1, so it never sets the minimum.
    return min([eps1] + gaps) / 2


class WinVector(tuple):
    """Exact probability vector (π_1, ..., π_n); a tuple of Fractions.

    Tuple indexing is 0-based like any tuple; use :meth:`pi` for the
    1-based player view.
    """

    def __new__(cls, components):
        comps = tuple(as_fraction(c) for c in components)
        if any(c < 0 for c in comps):
            raise ValueError(f"negative component in {comps}")
        if sum(comps) != 1:
            raise ValueError(f"components sum to {sum(comps)}, not 1")
        return super().__new__(cls, comps)

    @property
    def n(self) -> int:
        return len(self)

    def pi(self, k: int) -> Fraction:
        return self[k - 1]

    def to_json(self) -> list[str]:
        return [fraction_str(c) for c in self]

    @classmethod
    def uniform(cls, n: int) -> "WinVector":
        return cls([Fraction(1, n)] * n)

    def __repr__(self):
        return "WinVector(" + ", ".join(fraction_str(c) for c in self) + ")"


class TournamentMap:
    """A function from match matrices to win vectors, evaluated pointwise.

    ``fn`` receives a :class:`MatchMatrix` and returns a sequence of
    rationals summing to 1.  Continuity is assumed, never checked.
    """

    def __init__(self, n: int, fn: Callable[[MatchMatrix], Sequence], name: str = "map"):
        self.n = n
        self.fn = fn
        self.name = name

    def __call__(self, P: MatchMatrix) -> WinVector:
        if P.n != self.n:
            raise ValueError(f"{self.name} is an {self.n}-player map, got n={P.n}")
        return WinVector(self.fn(P))

    def __repr__(self):
        return f"TournamentMap({self.name}, n={self.n})"


P_STAR = MatchMatrix.from_upper(3, {(1, 2): HALF, (1, 3): ONE, (2, 3): HALF})
