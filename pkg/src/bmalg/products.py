"""Cyclic multilinear (BM) products and their relatives.

The m-fold product of order-m hypermatrices contracts one shared index:
operand s (0-indexed) carries the contraction index in axis (s+1) mod m, so
operand m-1 wraps around to axis 0.  For m=2 this is the ordinary matrix
product.  The general product replaces the shared index with m independent
ones weighted by a cubic background hypermatrix; the Kronecker delta as
background recovers the plain product, and the slot deltas give the outer
products whose sum it is.

Also here: Kronecker products, direct sums, and multilinear forms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from bmalg.core import Hypermatrix, HypermatrixError, asarray


class ConformabilityError(HypermatrixError):
    """Raised when a tuple of operands does not fit the product pattern."""


@dataclass(frozen=True)
class ConformabilityReport:
    contracted_length: int
    result_shape: tuple


def _contraction_axis(s, m):
    return (s + 1) % m


def conformability_report(operands):
    """Validate a tuple of product operands, returning the contracted length
    and result shape, or raising ConformabilityError naming the offender."""
    ops = [asarray(A) for A in operands]
    m = len(ops)
    if m < 2:
        raise ConformabilityError("need at least 2 operands, got %d" % m)
    for s, arr in enumerate(ops):
        if arr.ndim != m:
            raise ConformabilityError(
                "operand %d has order %d, want order %d (one per operand)"
                % (s, arr.ndim, m))
    k = ops[0].shape[_contraction_axis(0, m)]
    for s, arr in enumerate(ops):
        c = _contraction_axis(s, m)
        if arr.shape[c] != k:
            raise ConformabilityError(
                "operand %d axis %d has length %d, contracted length is %d"
                % (s, c, arr.shape[c], k))
    result_shape = []
    for a in range(m):
        owner = (a - 1) % m  # the operand whose contraction axis is a
        contributors = [s for s in range(m) if s != owner]
        n = ops[contributors[0]].shape[a]
        for s in contributors[1:]:
            if ops[s].shape[a] != n:
                raise ConformabilityError(
                    "operand %d axis %d has length %d, but operand %d says %d"
                    % (s, a, ops[s].shape[a], contributors[0], n))
        result_shape.append(n)
    return ConformabilityReport(contracted_length=int(k),
                                result_shape=tuple(result_shape))


def bm_product(operands):
    """Cyclic m-operand product: entry (i1,...,im) sums over a single shared
    contraction index sitting in axis (s+1) mod m of operand s."""
    report = conformability_report(operands)
    ops = [asarray(A) for A in operands]
    m = len(ops)
    args = []
    for s, arr in enumerate(ops):
        c = _contraction_axis(s, m)
        args.append(arr)
        args.append([m if a == c else a for a in range(m)])
    args.append(list(range(m)))
    out = np.einsum(*args, optimize=False)
    return Hypermatrix(out.reshape(report.result_shape))


def general_bm_product(operands, background):
    """Background-weighted product: m independent contraction indices
    j_0..j_{m-1}, weighted by background[j_0,...,j_{m-1}]."""
    report = conformability_report(operands)
    ops = [asarray(A) for A in operands]
    m = len(ops)
    k = report.contracted_length
    b = asarray(background)
    if b.shape != (k,) * m:
        raise ConformabilityError(
            "background must be cubic of order %d and side %d, got shape %r"
            % (m, k, b.shape))
    args = []
    for s, arr in enumerate(ops):
        c = _contraction_axis(s, m)
        args.append(arr)
        args.append([m + s if a == c else a for a in range(m)])
    args.append(b)
    args.append(list(range(m, 2 * m)))
    args.append(list(range(m)))
    out = np.einsum(*args, optimize=False)
    return Hypermatrix(out.reshape(report.result_shape))


def outer_product_slot(operands, t):
    """Slot-t outer product: every operand's contraction index pinned to t.

    Summing over all t recovers bm_product.  Equals general_bm_product with
    the slot delta as background (tested both ways, computed independently
    here by pinned broadcasting).
    """
    report = conformability_report(operands)
    if not 0 <= t < report.contracted_length:
        raise ConformabilityError(
            "slot %d out of range for contracted length %d"
            % (t, report.contracted_length))
    ops = [asarray(A) for A in operands]
    m = len(ops)
    out = None
    for s, arr in enumerate(ops):
        piece = np.take(arr, [t], axis=_contraction_axis(s, m))
        out = piece if out is None else out * piece
    return Hypermatrix(out)


def kron_delta(m, n):
    """Order-m side-n Kronecker delta: 1 exactly on all-equal index tuples."""
    if m < 2 or n < 1:
        raise HypermatrixError("kron_delta wants m >= 2, n >= 1")
    arr = np.zeros((n,) * m, dtype=np.complex128)
    arr[tuple([np.arange(n)] * m)] = 1.0
    return Hypermatrix(arr)


def kron_delta_slot(m, n, t):
    """Slot delta: single 1 at (t,...,t)."""
    if m < 2 or n < 1:
        raise HypermatrixError("kron_delta_slot wants m >= 2, n >= 1")
    if not 0 <= t < n:
        raise HypermatrixError("slot %d out of range for side %d" % (t, n))
    arr = np.zeros((n,) * m, dtype=np.complex128)
    arr[(t,) * m] = 1.0
    return Hypermatrix(arr)


def kronecker(A, B):
    """Per-axis Kronecker product of two equal-order hypermatrices."""
    a, b = asarray(A), asarray(B)
    if a.ndim != b.ndim:
        raise HypermatrixError("kronecker: orders %d and %d differ"
                               % (a.ndim, b.ndim))
    return Hypermatrix(np.kron(a, b))


def direct_sum(A, B):
    """Block diagonal sum of two cubic hypermatrices of the same order."""
    a, b = asarray(A), asarray(B)
    if a.ndim != b.ndim:
        raise HypermatrixError("direct_sum: orders %d and %d differ"
                               % (a.ndim, b.ndim))
    m = a.ndim
    if len(set(a.shape)) != 1 or len(set(b.shape)) != 1:
        raise HypermatrixError(
            "direct_sum needs cubic operands, got %r and %r"
            % (a.shape, b.shape))
    n0, n1 = a.shape[0], b.shape[0]
    out = np.zeros(((n0 + n1),) * m, dtype=np.complex128)
    out[(np.s_[:n0],) * m] = a
    out[(np.s_[n0:],) * m] = b
    return Hypermatrix(out)


def multilinear_form(A, vectors):
    """Evaluate sum_i A[i1,...,im] * x1[i1] * ... * xm[im].

    The j-th vector pairs with axis j of A; for m=2 this is x^T A y.  Vectors
    are accepted raw (shape (n,1,...,1) or anything that flattens to length
    n); the cyclic-transpose bookkeeping of the product form is internal.
    """
    a = asarray(A)
    m = a.ndim
    if len(vectors) != m:
        raise HypermatrixError("multilinear_form: %d vectors for order %d"
                               % (len(vectors), m))
    flats = []
    for j, x in enumerate(vectors):
        v = asarray(x).reshape(-1)
        if v.size != a.shape[j]:
            raise HypermatrixError(
                "vector %d has length %d, axis %d has length %d"
                % (j, v.size, j, a.shape[j]))
        flats.append(v)
    args = [a, list(range(m))]
    for j, v in enumerate(flats):
        args.append(v)
        args.append([j])
    args.append([])
    return complex(np.einsum(*args, optimize=False))


def form_operands(vectors):
    """The product-shaped view of a vector tuple: operand t is the t-th vector
    cyclically transposed m-1-t times, so bm_product(form_operands(xs)) is
    the scalar sum_j prod_t xs[t][j]."""
    from bmalg.core import transpose_power, vector as _vec
    m = len(vectors)
    ops = []
    for t, x in enumerate(vectors):
        v = asarray(x).reshape(-1)
        ops.append(transpose_power(_vec(v, order=m), m - 1 - t))
    return ops
