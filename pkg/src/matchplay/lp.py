"""Exact rational linear programming (two-phase simplex, Bland's rule).

Problems have non-negative variables only::

    maximize / minimize   c . x
    subject to            A_eq x  = b_eq
                          A_le x <= b_le
                          x >= 0

Rows and the objective are sparse ``{column: coefficient}`` dicts of
Fractions.  Every result carries a certificate:

* optimal    -- primal ``x`` and dual ``(y_eq, y_le)`` with equal objective values,
* infeasible -- Farkas multipliers ``(y_eq, y_le)`` with ``y_le >= 0``,
  ``A^T y >= 0`` column-wise and ``b . y < 0``,
* unbounded  -- a feasible ``x`` and a ray ``d >= 0`` with ``A_eq d = 0``,
  ``A_le d <= 0`` and ``c . d`` improving.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .core import as_fraction


def _coeffs(row) -> dict:
    if isinstance(row, Mapping):
        items = row.items()
    else:
        items = enumerate(row)
    out = {}
    for k, v in items:
        v = as_fraction(v)
        if v:
            out[int(k)] = out.get(int(k), 0) + v
    return {k: v for k, v in out.items() if v}


@dataclass
class LinearProgram:
    num_vars: int
    objective: dict = field(default_factory=dict)
    maximize: bool = True
    eq_rows: list = field(default_factory=list)
    eq_rhs: list = field(default_factory=list)
    le_rows: list = field(default_factory=list)
    le_rhs: list = field(default_factory=list)

    def __post_init__(self):
        self.objective = _coeffs(self.objective)

    def add_eq(self, coeffs, rhs) -> None:
        self.eq_rows.append(_coeffs(coeffs))
        self.eq_rhs.append(as_fraction(rhs))

    def add_le(self, coeffs, rhs) -> None:
        self.le_rows.append(_coeffs(coeffs))
        self.le_rhs.append(as_fraction(rhs))

    def add_ge(self, coeffs, rhs) -> None:
        self.add_le({k: -v for k, v in _coeffs(coeffs).items()}, -as_fraction(rhs))

    def set_objective(self, coeffs, maximize: bool = True) -> None:
        self.objective = _coeffs(coeffs)
        self.maximize = maximize

    def copy(self) -> "LinearProgram":
        return LinearProgram(
            self.num_vars, dict(self.objective), self.maximize,
            [dict(r) for r in self.eq_rows], list(self.eq_rhs),
            [dict(r) for r in self.le_rows], list(self.le_rhs),
        )


@dataclass
class LPResult:
    status: str
    value: Fraction | None = None
    x: list | None = None
    y_eq: list | None = None
    y_le: list | None = None
    ray: list | None = None

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"

    @property
    def feasible(self) -> bool:
        return self.status in ("optimal", "unbounded")


class _Tableau:
    def __init__(self, rows, rhs, basis):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.pivots = 0

    def pivot(self, r: int, k: int, obj: dict) -> None:
        row = self.rows[r]
        piv = row[k]
        if piv != 1:
            inv = 1 / piv
            for c in row:
                row[c] *= inv
            self.rhs[r] *= inv
        b = self.rhs[r]
        for s, other in enumerate(self.rows):
            if s == r:
                continue
            f = other.get(k)
            if not f:
                continue
            for c, v in row.items():
                nv = other.get(c, 0) - f * v
                if nv:
                    other[c] = nv
                else:
                    other.pop(c, None)
            self.rhs[s] -= f * b
        f = obj.get(k)
        if f:
            for c, v in row.items():
                nv = obj.get(c, 0) - f * v
                if nv:
                    obj[c] = nv
                else:
                    obj.pop(c, None)
            obj["value"] = obj.get("value", 0) + f * b
        self.basis[r] = k
        self.pivots += 1

    def run(self, obj: dict, allowed) -> int | None:
        """Maximize; ``obj`` holds reduced costs.  Returns an unbounded column or None."""
        while True:
            entering = None
            for c in sorted(k for k, v in obj.items() if k != "value" and v > 0):
                if allowed(c):
                    entering = c
                    break
            if entering is None:
                return None
            best = None
            for r, row in enumerate(self.rows):
                a = row.get(entering)
                if a is not None and a > 0:
                    key = (self.rhs[r] / a, self.basis[r])
                    if best is None or key < best[0]:
                        best = (key, r)
            if best is None:
                return entering
            self.pivot(best[1], entering, obj)


def lp_solve(lp: LinearProgram) -> LPResult:
    """Solve exactly; deterministic pivoting (Bland's smallest-index rule)."""
    nv = lp.num_vars
    for row in lp.eq_rows + lp.le_rows:
        for k in row:
            if not 0 <= k < nv:
                raise ValueError(f"column {k} outside 0..{nv - 1}")
    n_eq, n_le = len(lp.eq_rows), len(lp.le_rows)
    m = n_eq + n_le
    rows, rhs, signs, basis = [], [], [], []
    unit_col = []
    art_start = nv + n_le
    n_art = 0
    for r in range(m):
        if r < n_eq:
            row, b = dict(lp.eq_rows[r]), lp.eq_rhs[r]
        else:
            row, b = dict(lp.le_rows[r - n_eq]), lp.le_rhs[r - n_eq]
            row[nv + r - n_eq] = Fraction(1)
        sign = 1
        if b < 0:
            sign = -1
            row = {k: -v for k, v in row.items()}
            b = -b
        if r >= n_eq and sign == 1:
            col = nv + r - n_eq
        else:
            col = art_start + n_art
            n_art += 1
            row[col] = Fraction(1)
        rows.append(row)
        rhs.append(Fraction(b))
        signs.append(sign)
        basis.append(col)
        unit_col.append(col)
    tab = _Tableau(rows, rhs, basis)

    def is_art(c):
        return c >= art_start

    # phase 1: maximize -sum(artificials)
    obj: dict = {"value": Fraction(0)}
    for r, col in enumerate(basis):
        if is_art(col):
            for c, v in rows[r].items():
                if not is_art(c):
                    obj[c] = obj.get(c, 0) + v
            obj["value"] -= rhs[r]
    obj = {k: v for k, v in obj.items() if v or k == "value"}
    if n_art:
        tab.run(obj, lambda c: not is_art(c))
    if obj.get("value", 0) < 0:
        y = []
        for r, col in enumerate(unit_col):
            cost = -1 if is_art(col) else 0
            y.append(Fraction(signs[r] * (cost - obj.get(col, 0))))
        return LPResult("infeasible", y_eq=y[:n_eq], y_le=y[n_eq:])

    # drive zero-level artificials out of the basis where possible
    for r in range(m):
        if is_art(basis[r]):
            for c in sorted(k for k in rows[r] if not is_art(k)):
                tab.pivot(r, c, obj)
                break

    sense = 1 if lp.maximize else -1
    cost = {k: sense * v for k, v in lp.objective.items()}
    obj = {"value": Fraction(0)}
    obj.update(cost)
    for r, col in enumerate(basis):
        cb = cost.get(col)
        if cb:
            for c, v in rows[r].items():
                nv_ = obj.get(c, 0) - cb * v
                if nv_:
                    obj[c] = nv_
                else:
                    obj.pop(c, None)
            obj["value"] += cb * rhs[r]
    unbounded_col = tab.run(obj, lambda c: not is_art(c))

    x = [Fraction(0)] * nv
    for r, col in enumerate(basis):
        if col < nv:
            x[col] = rhs[r]
    if unbounded_col is not None:
        ray = [Fraction(0)] * nv
        if unbounded_col < nv:
            ray[unbounded_col] = Fraction(1)
        for r, col in enumerate(basis):
            a = rows[r].get(unbounded_col)
            if a and col < nv:
                ray[col] = -a
        return LPResult("unbounded", x=x, ray=ray)

    value = sum((lp.objective.get(k, 0) * x[k] for k in lp.objective), Fraction(0))
    y = []
    for r, col in enumerate(unit_col):
        y.append(Fraction(sense * signs[r] * (cost.get(col, 0) - obj.get(col, 0))))
    return LPResult("optimal", value=value, x=x, y_eq=y[:n_eq], y_le=y[n_eq:])


def dual_value(lp: LinearProgram, res: LPResult) -> Fraction:
    return sum((b * y for b, y in zip(lp.eq_rhs, res.y_eq)), Fraction(0)) + sum(
        (b * y for b, y in zip(lp.le_rhs, res.y_le)), Fraction(0)
    )


def check_certificate(lp: LinearProgram, res: LPResult) -> bool:
    """Verify the certificate attached to ``res`` independently of the solver."""
    nv = lp.num_vars

    def col_sums(y_eq, y_le):
        out = [Fraction(0)] * nv
        for row, y in zip(lp.eq_rows, y_eq):
            for k, v in row.items():
                out[k] += v * y
        for row, y in zip(lp.le_rows, y_le):
            for k, v in row.items():
                out[k] += v * y
        return out

    def primal_ok(x):
        if any(v < 0 for v in x):
            return False
        for row, b in zip(lp.eq_rows, lp.eq_rhs):
            if sum(v * x[k] for k, v in row.items()) != b:
                return False
        for row, b in zip(lp.le_rows, lp.le_rhs):
            if sum(v * x[k] for k, v in row.items()) > b:
                return False
        return True

    if res.status == "infeasible":
        if any(v < 0 for v in res.y_le):
            return False
        return all(s >= 0 for s in col_sums(res.y_eq, res.y_le)) and dual_value(lp, res) < 0
    if res.status == "unbounded":
        d = res.ray
        if not primal_ok(res.x) or any(v < 0 for v in d):
            return False
        for row in lp.eq_rows:
            if sum(v * d[k] for k, v in row.items()) != 0:
                return False
        for row in lp.le_rows:
            if sum(v * d[k] for k, v in row.items()) > 0:
                return False
        gain = sum(lp.objective.get(k, 0) * d[k] for k in range(nv))
        return gain > 0 if lp.maximize else gain < 0
    # optimal: primal feasible, dual feasible, equal objectives
    if not primal_ok(res.x):
        return False
    sums = col_sums(res.y_eq, res.y_le)
    c = [lp.objective.get(k, Fraction(0)) for k in range(nv)]
    if lp.maximize:
        if any(s < ck for s, ck in zip(sums, c)) or any(v < 0 for v in res.y_le):
            return False
    else:
        if any(s > ck for s, ck in zip(sums, c)) or any(v > 0 for v in res.y_le):
            return False
    return dual_value(lp, res) == res.value
