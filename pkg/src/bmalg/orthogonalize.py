"""Gram-Schmidt-style orthogonalization for hypermatrices.

From a generic cubic input A, derive X whose cyclic product
Prod(X, X^T^(m-1), ..., X^T) is diagonal, by solving slot-wise monomial
constraints: for every slot t and off-diagonal index class,

    prod of the X factor entries  =  slot-t product of A  -  (1/n) full product of A.

Summed over t the right side telescopes to zero, which is why any solution
has an exactly diagonal product; row normalization then lands on the
Kronecker delta.  The same recipe with independent unknowns per operand
solves the constrained uncorrelated-tuple problem.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from bmalg.core import Hypermatrix, HypermatrixError
from bmalg.monomial import (DegeneracyError, InfeasibleSystemError,
                            MonomialSystem, gauss_jordan_solve,
                            monomial_system)
from bmalg.products import bm_product, outer_product_slot
from bmalg.structured import cyclic_transpose_tuple, is_orthogonal, is_uncorrelated


@dataclass(frozen=True)
class OrthogonalizationProblem:
    input: Hypermatrix
    system: MonomialSystem


def _as_hm(A):
    return A if isinstance(A, Hypermatrix) else Hypermatrix(A)


def _check_no_zero_entries(arr, what):
    if np.any(arr == 0):
        raise HypermatrixError(
            "%s has zero entries; the multiplicative solve needs all entries "
            "nonzero" % what)


def _offdiag_rotation_classes(n, m):
    """Off-diagonal index tuples up to cyclic rotation (the cyclic product
    entry and its constraint are rotation-invariant)."""
    reps = []
    for i in np.ndindex((n,) * m):
        if len(set(i)) == 1:
            continue
        if i == min(tuple(i[s:] + i[:s]) for s in range(m)):
            reps.append(i)
    return reps


def _factor_entry(i, t, s, m):
    """Index of factor s in the slot-t product of the cyclic transpose tuple:
    (i_s, t, i_{s+2}, ..., i_{s+m-1})."""
    return tuple(t if q == 1 else i[(s + q) % m] for q in range(m))


def _slot_targets(ops, n, m):
    """RHS hypermatrices per slot: P_t(A) - (1/n) * Prod(A)."""
    full = bm_product(ops).array
    return [outer_product_slot(ops, t).array - full / n for t in range(n)]


def build_orthogonalization_system(A):
    """Monomial system over the n^m entries of X (row-major unknowns)."""
    A = _as_hm(A)
    if len(set(A.shape)) != 1:
        raise HypermatrixError("input must be cubic, got %r" % (A.shape,))
    _check_no_zero_entries(A.array, "input")
    m = A.order
    n = A.shape[0]
    targets = _slot_targets(cyclic_transpose_tuple(A), n, m)
    rows = []
    rhs = []
    for t in range(n):
        for i in _offdiag_rotation_classes(n, m):
            exps = [0] * (n ** m)
            for s in range(m):
                exps[int(np.ravel_multi_index(_factor_entry(i, t, s, m),
                                              (n,) * m))] += 1
            b = targets[t][i]
            if b == 0:
                raise DegeneracyError(
                    "slot %d constraint at %r has zero right side" % (t, i))
            rows.append(exps)
            rhs.append(b)
    return OrthogonalizationProblem(input=A,
                                    system=monomial_system(rows, rhs))


def normalize_rows(X, tol=1e-12):
    """Scale axis-0 slices so the cyclic product's diagonal becomes 1.

    The i-th diagonal entry is d_i = sum_t X[i,t,i,...,i]^m; slice i is
    divided by the principal m-th root of d_i.  For matrices this is the
    usual division of row i by sqrt([X X^T]_ii).
    """
    X = _as_hm(X)
    if len(set(X.shape)) != 1:
        raise HypermatrixError("normalize_rows needs a cubic input")
    m = X.order
    n = X.shape[0]
    arr = X.array.copy()
    for i in range(n):
        d = 0j
        for t in range(n):
            d += complex(arr[(i, t) + (i,) * (m - 2)]) ** m
        if abs(d) <= tol:
            raise DegeneracyError(
                "diagonal product entry %d vanishes (%r); cannot normalize"
                % (i, d))
        arr[i] = arr[i] * np.exp(-np.log(complex(d)) / m)
    return Hypermatrix(arr)


def solve_orthogonalization(A, tol=1e-9):
    """Build, solve, normalize, and verify.  Free unknowns default to 1."""
    problem = build_orthogonalization_system(A)
    try:
        sol = gauss_jordan_solve(problem.system)
    except InfeasibleSystemError as exc:
        raise DegeneracyError("orthogonalization system "
                              "inconsistent: %s" % exc) from exc
    n = problem.input.shape[0]
    m = problem.input.order
    try:
        X = normalize_rows(
            Hypermatrix(np.asarray(sol.values).reshape((n,) * m)))
    except DegeneracyError:
        sol = _resolve_with_generic_frees(problem.system, sol.free_vars)
        X = normalize_rows(
            Hypermatrix(np.asarray(sol.values).reshape((n,) * m)))
    check = is_orthogonal(X, tol)
    if not check.ok:
        raise DegeneracyError("normalized solution misses orthogonality "
                              "(residual %.3e)" % check.residual)
    return X


def _resolve_with_generic_frees(system, free_vars):
    """Re-solve with pinned generic values for the free variables.

    The all-ones default can sit exactly on the vanishing locus of the
    diagonal polynomial (for tuple systems it always does: the slot targets
    telescope).  Pinning frees to fixed pseudo-random values off that locus
    keeps the output deterministic while restoring genericity.
    """
    rng = np.random.default_rng(0)
    pins = sorted(free_vars)
    n_vars = system.var_count
    rows = [list(r) for r in system.exponents]
    rhs = list(system.rhs)
    for f in pins:
        row = [0] * n_vars
        row[f] = 1
        rows.append(row)
        rhs.append(1.0 + rng.uniform(0.25, 1.0))
    return gauss_jordan_solve(monomial_system(rows, rhs))


def build_uncorrelated_system(operands):
    """Slot constraints for an m-tuple with independent unknowns per operand.

    Unknown layout: operand-major, each operand's entries row-major.
    One equation per slot and per off-diagonal index tuple (no rotation
    symmetry is available here since the operands differ).
    """
    ops = [_as_hm(A) for A in operands]
    m = len(ops)
    for s, A in enumerate(ops):
        if A.order != m or len(set(A.shape)) != 1:
            raise HypermatrixError("operand %d must be cubic of order %d" % (s, m))
        _check_no_zero_entries(A.array, "operand %d" % s)
    n = ops[0].shape[0]
    if any(A.shape[0] != n for A in ops):
        raise HypermatrixError("operands must share a side length")
    targets = _slot_targets(ops, n, m)
    block = n ** m
    rows = []
    rhs = []
    for t in range(n):
        for i in np.ndindex((n,) * m):
            if len(set(i)) == 1:
                continue
            exps = [0] * (m * block)
            for s in range(m):
                idx = list(i)
                idx[(s + 1) % m] = t
                exps[s * block + int(np.ravel_multi_index(tuple(idx),
                                                          (n,) * m))] += 1
            b = targets[t][i]
            if b == 0:
                raise DegeneracyError(
                    "slot %d constraint at %r has zero right side" % (t, i))
            rows.append(exps)
            rhs.append(b)
    return monomial_system(rows, rhs), n, m


def solve_uncorrelated(operands, tol=1e-9):
    """Derive an uncorrelated m-tuple satisfying the slot constraints of the
    input tuple, normalized so the product is the Kronecker delta."""
    system, n, m = build_uncorrelated_system(operands)
    try:
        sol = gauss_jordan_solve(system)
    except InfeasibleSystemError as exc:
        raise DegeneracyError("uncorrelated-tuple system "
                              "inconsistent: %s" % exc) from exc
    block = n ** m

    def _assemble(values):
        vals = np.asarray(values)
        return [Hypermatrix(vals[s * block:(s + 1) * block].reshape((n,) * m))
                for s in range(m)]

    def _normalize(xs):
        diag = bm_product(xs).array
        arr0 = xs[0].array.copy()
        for i in range(n):
            d = complex(diag[(i,) * m])
            if abs(d) <= 1e-12:
                raise DegeneracyError("diagonal product entry %d vanishes" % i)
            arr0[i] = arr0[i] / d
        return [Hypermatrix(arr0)] + xs[1:]

    try:
        xs = _normalize(_assemble(sol.values))
    except DegeneracyError:
        # the all-ones free assignment lies on the vanishing locus; retry
        # with deterministic generic frees
        sol = _resolve_with_generic_frees(system, sol.free_vars)
        xs = _normalize(_assemble(sol.values))
    check = is_uncorrelated(xs, tol)
    if not check.ok:
        raise DegeneracyError("normalized tuple misses uncorrelatedness "
                              "(residual %.3e)" % check.residual)
    return xs
