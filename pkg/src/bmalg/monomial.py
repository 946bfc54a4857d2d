"""Monomial constraint systems and two ways to solve them.

A system is a set of constraints prod_t x_t^{a_it} = b_i with rational
exponents a_it and nonzero complex right sides.  Taking logs makes the
constraints linear, so two solvers apply:

* gauss_jordan_solve -- multiplicative row reduction with exact rational
  exponent arithmetic.  Row ops are exchange, raising a row to a rational
  power, and multiplying one row by a power of another.  Principal branches
  are used throughout, with a bounded retry over alternate 2*pi windings on
  the pivot logs, gated by the substitution residual.
* log_least_square -- least squares on the log-linear system; recovers
  consistent systems and otherwise minimizes sum |ln(b_i^{-1} prod x^a)|^2.

Free variables default to 1 so real positive systems stay real positive.
"""

from __future__ import annotations

import cmath
import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from bmalg.core import HypermatrixError

FEAS_TOL = 1e-9
BRANCH_EVAL_CAP = 2000


class DegeneracyError(HypermatrixError):
    """A numeric degeneracy: zero value, vanishing pivot data, etc."""


class InfeasibleSystemError(HypermatrixError):
    """Elimination produced an unsatisfiable derived constraint.

    Attributes conflict_rhs / conflict_row hold the derived constraint
    "prod x^0 = rhs" with rhs far from 1.
    """

    def __init__(self, msg, conflict_rhs=None, conflict_row=None):
        super().__init__(msg)
        self.conflict_rhs = conflict_rhs
        self.conflict_row = conflict_row


def _as_fraction(v):
    if isinstance(v, Fraction):
        return v
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    if isinstance(v, float):
        return Fraction(v).limit_denominator(10 ** 9)
    raise TypeError("cannot interpret %r as a rational exponent" % (v,))


@dataclass(frozen=True)
class MonomialSystem:
    exponents: tuple  # rows of Fraction tuples, shape m x n
    rhs: tuple        # m nonzero complex scalars
    var_count: int

    def __post_init__(self):
        for i, b in enumerate(self.rhs):
            if b == 0:
                raise HypermatrixError("rhs[%d] is zero; monomial constraints "
                                       "need nonzero right sides" % i)


def monomial_system(exponents, rhs):
    """Build a MonomialSystem from nested exponent data and a rhs sequence."""
    rows = tuple(tuple(_as_fraction(v) for v in row) for row in exponents)
    n = len(rows[0]) if rows else 0
    for i, row in enumerate(rows):
        if len(row) != n:
            raise HypermatrixError("exponent row %d has %d entries, want %d"
                                   % (i, len(row), n))
    return MonomialSystem(exponents=rows,
                          rhs=tuple(complex(b) for b in rhs),
                          var_count=n)


@dataclass(frozen=True)
class MonomialSolution:
    values: tuple
    free_vars: tuple
    residual: float
    rank_deficient: bool = field(default=False)


def _principal_pow(z, a):
    """z**a with the principal branch for fractional a, exact for integers."""
    a = Fraction(a)
    if z == 0:
        raise DegeneracyError("0 cannot be raised to a rational power here")
    if a.denominator == 1:
        return complex(z) ** int(a)
    return cmath.exp(float(a) * cmath.log(z))


def residual(sys, values):
    """sum_i |Log(b_i^{-1} prod_j x_j^{a_ij})|^2 with principal logs."""
    vals = [complex(v) for v in values]
    for j, v in enumerate(vals):
        if v == 0:
            raise DegeneracyError("residual undefined: x_%d = 0" % j)
    total = 0.0
    for row, b in zip(sys.exponents, sys.rhs):
        prod = 1.0 + 0.0j
        for a, v in zip(row, vals):
            if a != 0:
                prod *= _principal_pow(v, a)
        total += abs(cmath.log(prod / b)) ** 2
    return total


def _eliminate(sys, windings):
    """One full Gauss-Jordan pass.

    windings maps pivot position -> integer w; the pivot's rhs is multiplied
    by exp(2*pi*i*w/a) when normalized by exponent a, choosing an alternate
    a-th root.  Returns (rows, rhs, pivots) where pivots is a list of
    (row, col, normalize_exponent).
    """
    rows = [list(r) for r in sys.exponents]
    rhs = list(sys.rhs)
    m, n = len(rows), sys.var_count
    pivots = []
    done_rows = set()
    for c in range(n):
        cands = [i for i in range(m) if i not in done_rows and rows[i][c] != 0]
        if not cands:
            continue
        r = max(cands, key=lambda i: (abs(rows[i][c]), -i))
        a = rows[r][c]
        w = windings.get(len(pivots), 0)
        new_rhs = _principal_pow(rhs[r], Fraction(1, 1) / a)
        if w:
            new_rhs *= cmath.exp(2j * cmath.pi * w / float(a))
        rhs[r] = new_rhs
        rows[r] = [v / a for v in rows[r]]
        for j in range(m):
            if j != r and rows[j][c] != 0:
                f = rows[j][c]
                rhs[j] *= _principal_pow(rhs[r], -f)
                rows[j] = [vj - f * vr for vj, vr in zip(rows[j], rows[r])]
        pivots.append((r, c, a))
        done_rows.add(r)
    return rows, rhs, pivots


def _read_solution(sys, rows, rhs, pivots, feas_tol):
    """Extract values (free vars = 1) and check derived zero rows."""
    n = sys.var_count
    pivot_cols = {c: r for r, c, _ in pivots}
    pivot_rows = {r for r, _, _ in pivots}
    for j in range(len(rows)):
        if j not in pivot_rows:
            if any(v != 0 for v in rows[j]):
                # can only happen if no pivot was available in those columns,
                # i.e. never: every nonzero column gets a pivot
                raise AssertionError("non-eliminated row survived")
            if abs(rhs[j] - 1.0) > feas_tol:
                return None, rhs[j], j
    values = []
    free = []
    for c in range(n):
        if c in pivot_cols:
            values.append(rhs[pivot_cols[c]])
        else:
            values.append(1.0 + 0.0j)
            free.append(c)
    return (tuple(values), tuple(free)), None, None


def _branch_multiplier_count(a):
    # number of distinct exp(2*pi*i*w/a) over w in {0,1,-1}
    vals = set()
    for w in (0, 1, -1):
        z = cmath.exp(2j * cmath.pi * w / float(a))
        vals.add((round(z.real, 12), round(z.imag, 12)))
    return len(vals)


def gauss_jordan_solve(sys, tol=FEAS_TOL):
    """Solve by multiplicative row reduction.

    Pivot choice: first column holding a nonzero exponent; within the column,
    the row with the largest |exponent| (ties to the earliest row).  Free
    variables are set to 1.  If the principal-branch solution misses the
    original constraints, alternate pivot-log windings (each in {0, +1, -1})
    are tried in order of total winding before giving up.
    """
    rows0, rhs0, pivots = _eliminate(sys, {})
    branchy = [i for i, (_, _, a) in enumerate(pivots)
               if _branch_multiplier_count(a) > 1]
    best = None  # (residual, values, free)
    first_conflict = None
    evals = 0
    options = [(0, 1, -1)] * len(branchy)
    for combo in sorted(itertools.product(*options),
                        key=lambda ws: (sum(abs(w) for w in ws), ws)):
        if evals >= BRANCH_EVAL_CAP:
            break
        evals += 1
        windings = {branchy[i]: w for i, w in enumerate(combo) if w}
        if windings:
            _, rhs, piv = _eliminate(sys, windings)
            rws = rows0  # exponent rows are winding-independent
        else:
            rhs, piv, rws = rhs0, pivots, rows0
        sol, conflict, conflict_row = _read_solution(sys, rws, rhs, piv, tol)
        if sol is None:
            if first_conflict is None:
                first_conflict = (conflict, conflict_row)
            continue
        values, free = sol
        try:
            res = residual(sys, values)
        except DegeneracyError:
            continue
        if res <= tol:
            return MonomialSolution(values=values, free_vars=free, residual=res)
        if best is None or res < best[0]:
            best = (res, values, free)
    if best is not None:
        return MonomialSolution(values=best[1], free_vars=best[2],
                                residual=best[0])
    conflict, row = first_conflict
    raise InfeasibleSystemError(
        "inconsistent system: derived constraint 1 = %r (row %d)"
        % (conflict, row), conflict_rhs=conflict, conflict_row=row)


def log_least_square(sys, tol=FEAS_TOL):
    """Least-squares solve of the log-linear system A l = Log b.

    Returns exp of the minimal-norm l.  Exactly consistent systems come back
    with (rewrapped) residual ~ 0; rank deficiency is flagged on the result.
    """
    m, n = len(sys.exponents), sys.var_count
    A = np.array([[float(v) for v in row] for row in sys.exponents])
    logb = np.array([cmath.log(b) for b in sys.rhs])
    l, _, rank, _ = np.linalg.lstsq(A.astype(complex), logb, rcond=None)
    values = tuple(cmath.exp(v) for v in l)
    res = residual(sys, values)
    return MonomialSolution(values=values, free_vars=(),
                            residual=res, rank_deficient=bool(rank < n))


# ---------------------------------------------------------------------------
# JSON format: {"exponents":[["p/q",...]],"rhs_re":[...],"rhs_im":[...]}

def system_to_json_dict(sys):
    return {
        "exponents": [[str(v) for v in row] for row in sys.exponents],
        "rhs_re": [b.real for b in sys.rhs],
        "rhs_im": [b.imag for b in sys.rhs],
    }


def system_from_json_dict(d):
    rhs_re = d["rhs_re"]
    rhs_im = d.get("rhs_im") or [0.0] * len(rhs_re)
    return monomial_system(d["exponents"],
                           [complex(a, b) for a, b in zip(rhs_re, rhs_im)])


def system_dumps(sys):
    return json.dumps(system_to_json_dict(sys))


def system_loads(s):
    return system_from_json_dict(json.loads(s))
