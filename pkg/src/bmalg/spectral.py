"""Spectral tools for side-length-2 hypermatrices.

Covers the side-2 determinant, the pair of scale-factor generators for
2x2x2 hypermatrices, the full 2x2x2 spectral decomposition (scale chain ->
2x2 block solve -> monomial recovery of the factor entries), composition of
decompositions over Kronecker-product / direct-sum trees, and the mod-2
group adjacency worked example with its one-parameter orthogonal family.
"""

from __future__ import annotations

import cmath
import itertools
from dataclasses import dataclass

import numpy as np

from .core import Hypermatrix, HypermatrixError, transpose, transpose_power
from .monomial import (DegeneracyError, InfeasibleSystemError,
                       gauss_jordan_solve, monomial_system)
from .products import bm_product, direct_sum, kronecker


class DecompositionError(HypermatrixError):
    """A spectral decomposition could not be produced.

    `report` is a small dict saying which stage failed and why.
    """

    def __init__(self, msg, report=None):
        super().__init__(msg)
        self.report = dict(report or {})


def _as_hm(A):
    return A if isinstance(A, Hypermatrix) else Hypermatrix(A)


def _require_shape_222(A):
    if A.shape != (2, 2, 2):
        raise HypermatrixError("expected a 2x2x2 hypermatrix, got shape %r"
                               % (A.shape,))


# ---------------------------------------------------------------------------
# side-2 determinant

def hyperdet_side2(A):
    """Product of even-parity entries minus product of odd-parity entries.

    Parity of an entry is the parity of the sum of its indices.  For
    matrices this is the usual 2x2 determinant; the cubic case is the
    constant term of the scale-factor generators below.
    """
    A = _as_hm(A)
    if A.order < 2:
        raise HypermatrixError("side-2 determinant needs order >= 2")
    if any(n != 2 for n in A.shape):
        raise HypermatrixError("side-2 determinant needs every side equal "
                               "to 2, got shape %r" % (A.shape,))
    even = 1.0 + 0j
    odd = 1.0 + 0j
    for idx in np.ndindex(A.shape):
        if sum(idx) % 2 == 0:
            even *= A[idx]
        else:
            odd *= A[idx]
    return even - odd


# ---------------------------------------------------------------------------
# scale-factor generators and the canonical chain

@dataclass(frozen=True)
class CharGenerators222:
    """Coefficients of the two generators constraining the squared scale
    products (s00)^2, (s01)^2, (s11)^2, where s_ab = mu_ab * nu_ab * omega_ab.

    Both generators read  odd_coeff * (next square) - even_coeff *
    (previous square) + constant  while walking the chain
    (s00)^2 -> (s01)^2 -> (s11)^2.  `constant` is the side-2 determinant.
    """

    odd_coeff: complex     # a001 * a010 * a100
    even_coeff: complex    # a011 * a101 * a110
    constant: complex

    def g1(self, s00_sq, s01_sq):
        return self.odd_coeff * s01_sq - self.even_coeff * s00_sq + self.constant

    def g2(self, s01_sq, s11_sq):
        return self.odd_coeff * s11_sq - self.even_coeff * s01_sq + self.constant


def char_generators_222(A):
    A = _as_hm(A)
    _require_shape_222(A)
    a = A.array
    return CharGenerators222(
        odd_coeff=complex(a[0, 0, 1] * a[0, 1, 0] * a[1, 0, 0]),
        even_coeff=complex(a[0, 1, 1] * a[1, 0, 1] * a[1, 1, 0]),
        constant=complex(hyperdet_side2(A)))


def scale_chain_222(A):
    """Squared scale products ((s00)^2, (s01)^2, (s11)^2) with g1 = g2 = 0.

    The head of the chain is free; it is pinned at twice the leading entry
    a000 (1 when that entry vanishes).  Seeding at a000 itself would zero
    out a slot product of the block solve (pi_1(0,0,0) is proportional to
    a000 - (s00)^2), so the factor 2 keeps the downstream recovery solvable
    while staying covariant under rescaling of the input.  The remaining
    squares follow from the generators.
    """
    A = _as_hm(A)
    gens = char_generators_222(A)
    a000 = complex(A.array[0, 0, 0])
    s00_sq = 2.0 * a000 if a000 != 0 else 1.0 + 0j
    if gens.odd_coeff == 0:
        raise DegeneracyError("a001*a010*a100 vanishes; the generator chain "
                              "cannot be walked")
    s01_sq = (gens.even_coeff * s00_sq - gens.constant) / gens.odd_coeff
    s11_sq = (gens.even_coeff * s01_sq - gens.constant) / gens.odd_coeff
    return s00_sq, s01_sq, s11_sq


def _principal_root(z, k):
    z = complex(z)
    if z == 0:
        return 0j
    return cmath.exp(cmath.log(z) / k)


def scale_matrices_222(A):
    """Symmetric 2x2 scale matrices (mu, nu, omega) for the decomposition.

    Each squared product from the chain gets a principal square root, and
    the resulting s_ab is split evenly: mu_ab = nu_ab = omega_ab = s_ab^(1/3)
    with the principal cube root.
    """
    s00_sq, s01_sq, s11_sq = scale_chain_222(A)
    entries = []
    for sq in (s00_sq, s01_sq, s11_sq):
        s = _principal_root(sq, 2)
        entries.append(_principal_root(s, 3))
    c = np.array([[entries[0], entries[1]],
                  [entries[1], entries[2]]], dtype=complex)
    return c.copy(), c.copy(), c.copy()


# ---------------------------------------------------------------------------
# block solve and entry recovery

def _block_scale(mu, nu, omega, i, j, k, t):
    return (mu[i, t] * mu[k, t] * nu[j, t] * nu[i, t]
            * omega[k, t] * omega[j, t])


def spectral_blocks_222(A, mu=None, nu=None, omega=None):
    """Per-entry block data: scales s[t,i,j,k] and slot products pi[t,i,j,k].

    Each entry (i,j,k) contributes the 2x2 system
        pi0 + pi1           = 1 if i == j == k else 0
        s0 * pi0 + s1 * pi1 = a_ijk
    which is inverted in closed form.  A vanishing gap s1 - s0 is the block
    degeneracy and raises.
    """
    A = _as_hm(A)
    _require_shape_222(A)
    if mu is None:
        mu, nu, omega = scale_matrices_222(A)
    a = A.array
    s = np.empty((2, 2, 2, 2), dtype=complex)
    pi = np.empty((2, 2, 2, 2), dtype=complex)
    for i, j, k in np.ndindex(2, 2, 2):
        s0 = _block_scale(mu, nu, omega, i, j, k, 0)
        s1 = _block_scale(mu, nu, omega, i, j, k, 1)
        gap = s1 - s0
        if abs(gap) <= 1e-12 * (1.0 + abs(s0) + abs(s1)):
            raise DecompositionError(
                "block (%d,%d,%d) is degenerate: both slot scales equal %r"
                % (i, j, k, s0),
                report={"stage": "blocks", "block": (i, j, k)})
        d = 1.0 if i == j == k else 0.0
        s[0, i, j, k], s[1, i, j, k] = s0, s1
        pi[0, i, j, k] = (s1 * d - a[i, j, k]) / gap
        pi[1, i, j, k] = (a[i, j, k] - s0 * d) / gap
    return s, pi


def _recovery_system(pi):
    """Monomial system u_itk * v_jti * w_ktj = pi_t(i,j,k).

    24 unknowns ordered U entries, then V, then W, each C-order flattened.
    """
    rows = []
    rhs = []
    for i, j, k in np.ndindex(2, 2, 2):
        for t in range(2):
            val = complex(pi[t, i, j, k])
            if val == 0:
                raise DecompositionError(
                    "slot product pi_%d(%d,%d,%d) vanishes; cannot recover "
                    "factor entries" % (t, i, j, k),
                    report={"stage": "recovery", "block": (i, j, k),
                            "slot": t})
            row = [0] * 24
            row[4 * i + 2 * t + k] = 1
            row[8 + 4 * j + 2 * t + i] = 1
            row[16 + 4 * k + 2 * t + j] = 1
            rows.append(row)
            rhs.append(val)
    return monomial_system(rows, rhs)


@dataclass(frozen=True)
class SpectralDecomposition222:
    U: Hypermatrix
    V: Hypermatrix
    W: Hypermatrix
    mu: np.ndarray
    nu: np.ndarray
    omega: np.ndarray


def scale_hypermatrix(scales):
    """Lift a symmetric n x n scale matrix to its sparse cubic form:
    [D]_ijk = scales[i,k] when j == k, zero otherwise."""
    s = np.asarray(scales, dtype=complex)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise HypermatrixError("scale matrix must be square, got %r"
                               % (s.shape,))
    n = s.shape[0]
    d = np.zeros((n, n, n), dtype=complex)
    for k in range(n):
        d[:, k, k] = s[:, k]
    return Hypermatrix(d)


def _scaled_factor(X, scales):
    D = scale_hypermatrix(scales)
    return bm_product([X, D, transpose(D)])


def reconstruct(dec):
    """Prod(Prod(U,D0,D0^T), Prod(V,D1,D1^T)^T^2, Prod(W,D2,D2^T)^T)."""
    left = _scaled_factor(dec.U, dec.mu)
    mid = transpose_power(_scaled_factor(dec.V, dec.nu), 2)
    right = transpose(_scaled_factor(dec.W, dec.omega))
    return bm_product([left, mid, right])


def spectral_decompose_222(A, tol=1e-6):
    """Full 2x2x2 spectral decomposition.

    Needs all entries nonzero and a nonvanishing side-2 determinant.  The
    scale chain fixes (mu, nu, omega), the per-entry blocks give the slot
    products, and a monomial Gauss-Jordan solve (free variables pinned to 1)
    recovers the U, V, W entries.  The reconstruction is verified to `tol`
    relative before returning.
    """
    A = _as_hm(A)
    _require_shape_222(A)
    a = A.array
    zeros = np.argwhere(a == 0)
    if len(zeros):
        where = tuple(int(v) for v in zeros[0])
        raise DecompositionError(
            "entry %r is zero; the decomposition needs all entries nonzero"
            % (where,),
            report={"stage": "precondition", "zero_entry": where})
    det = hyperdet_side2(A)
    det_scale = (abs(a[0, 0, 0] * a[0, 1, 1] * a[1, 0, 1] * a[1, 1, 0])
                 + abs(a[0, 0, 1] * a[0, 1, 0] * a[1, 0, 0] * a[1, 1, 1]))
    if abs(det) <= 1e-12 * (1.0 + det_scale):
        raise DecompositionError(
            "side-2 determinant vanishes (%r); no rank-2 decomposition"
            % (det,),
            report={"stage": "precondition", "determinant": det})
    mu, nu, omega = scale_matrices_222(A)
    _, pi = spectral_blocks_222(A, mu, nu, omega)
    system = _recovery_system(pi)
    try:
        sol = gauss_jordan_solve(system)
    except InfeasibleSystemError as exc:
        raise DecompositionError(
            "factor-entry recovery is infeasible: %s" % exc,
            report={"stage": "recovery",
                    "conflict_row": exc.conflict_row})
    vals = np.asarray(sol.values, dtype=complex)
    dec = SpectralDecomposition222(
        U=Hypermatrix(vals[:8].reshape(2, 2, 2)),
        V=Hypermatrix(vals[8:16].reshape(2, 2, 2)),
        W=Hypermatrix(vals[16:24].reshape(2, 2, 2)),
        mu=mu, nu=nu, omega=omega)
    rec = reconstruct(dec)
    rel = float(np.max(np.abs(rec.array - a)) / np.max(np.abs(a)))
    if rel > tol:
        raise DecompositionError(
            "reconstruction misses the input (relative residual %.3e)" % rel,
            report={"stage": "verify", "residual": rel})
    return dec


# ---------------------------------------------------------------------------
# matrix case and kron/dsum composition

@dataclass(frozen=True)
class MatrixSpectral:
    U: np.ndarray
    V: np.ndarray
    lam: np.ndarray

    def reconstruct(self):
        return np.asarray(self.U) @ np.diag(np.asarray(self.lam)) \
            @ np.asarray(self.V).T


def matrix_spectral_2x2(A):
    """Eigendecomposition of a 2x2 matrix in the U * diag(lam) * V^T shape
    with U * V^T = I (so V is the inverse-transpose of the eigenvectors)."""
    arr = np.asarray(A.array if isinstance(A, Hypermatrix) else A,
                     dtype=complex)
    if arr.shape != (2, 2):
        raise HypermatrixError("expected a 2x2 matrix, got shape %r"
                               % (arr.shape,))
    lam, vecs = np.linalg.eig(arr)
    if abs(np.linalg.det(vecs)) < 1e-12:
        raise DecompositionError(
            "eigenvector matrix is singular; the generator is defective",
            report={"stage": "matrix"})
    V = np.linalg.inv(vecs).T
    return MatrixSpectral(U=vecs, V=V, lam=lam)


def _is_tree_node(node):
    return (isinstance(node, (tuple, list)) and len(node) == 3
            and isinstance(node[0], str))


def evaluate_tree(tree):
    """Fold a ("kron"|"dsum", left, right) generator tree into the composed
    hypermatrix (leaves are matrices or cubic hypermatrices)."""
    if _is_tree_node(tree):
        op, left, right = tree
        if op not in ("kron", "dsum"):
            raise HypermatrixError("unknown tree op %r" % (op,))
        L = evaluate_tree(left)
        R = evaluate_tree(right)
        return kronecker(L, R) if op == "kron" else direct_sum(L, R)
    return _as_hm(tree)


def compose_spectral(tree, tol=1e-6):
    """Decompose every leaf of a kron/dsum tree and combine the
    decompositions factor-wise.  Leaf failures carry their tree position."""
    return _compose_node(tree, "root", tol)


def _compose_node(node, path, tol):
    if _is_tree_node(node):
        op, left, right = node
        if op not in ("kron", "dsum"):
            raise DecompositionError("unknown tree op %r at %s" % (op, path),
                                     report={"path": path})
        L = _compose_node(left, path + ".left", tol)
        R = _compose_node(right, path + ".right", tol)
        if isinstance(L, MatrixSpectral) != isinstance(R, MatrixSpectral):
            raise DecompositionError(
                "mixed generator orders under %s" % path,
                report={"path": path})
        if isinstance(L, MatrixSpectral):
            return _combine_matrix(op, L, R)
        return _combine_222(op, L, R)
    arr = np.asarray(node.array if isinstance(node, Hypermatrix) else node,
                     dtype=complex)
    try:
        if arr.ndim == 2:
            return matrix_spectral_2x2(arr)
        if arr.ndim == 3:
            return spectral_decompose_222(arr, tol=tol)
    except HypermatrixError as exc:
        raise DecompositionError(
            "generator at %s failed: %s" % (path, exc),
            report={"path": path, "cause": str(exc)})
    raise DecompositionError(
        "generator at %s has order %d; want a matrix or a cubic hypermatrix"
        % (path, arr.ndim),
        report={"path": path})


def _dsum_matrix(x, y):
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    out = np.zeros((x.shape[0] + y.shape[0], x.shape[1] + y.shape[1]),
                   dtype=complex)
    out[:x.shape[0], :x.shape[1]] = x
    out[x.shape[0]:, x.shape[1]:] = y
    return out


def _combine_matrix(op, L, R):
    if op == "kron":
        return MatrixSpectral(U=np.kron(L.U, R.U), V=np.kron(L.V, R.V),
                              lam=np.kron(L.lam, R.lam))
    return MatrixSpectral(U=_dsum_matrix(L.U, R.U),
                          V=_dsum_matrix(L.V, R.V),
                          lam=np.concatenate([L.lam, R.lam]))


def _combine_222(op, L, R):
    if op == "kron":
        return SpectralDecomposition222(
            U=kronecker(L.U, R.U), V=kronecker(L.V, R.V),
            W=kronecker(L.W, R.W),
            mu=np.kron(L.mu, R.mu), nu=np.kron(L.nu, R.nu),
            omega=np.kron(L.omega, R.omega))
    return SpectralDecomposition222(
        U=direct_sum(L.U, R.U), V=direct_sum(L.V, R.V),
        W=direct_sum(L.W, R.W),
        mu=_dsum_matrix(L.mu, R.mu), nu=_dsum_matrix(L.nu, R.nu),
        omega=_dsum_matrix(L.omega, R.omega))


# ---------------------------------------------------------------------------
# the mod-2 group adjacency example

def group_adjacency_z2(k):
    """Adjacency hypermatrix of the k-fold product of the order-2 group:
    a_ijk = 1 iff i xor j == k bitwise.  Built as the k-fold Kronecker
    power of the 2x2x2 base."""
    if int(k) < 1:
        raise HypermatrixError("need k >= 1, got %r" % (k,))
    base = np.zeros((2, 2, 2), dtype=complex)
    for i, j in np.ndindex(2, 2):
        base[i, j, (i + j) % 2] = 1.0
    out = base
    for _ in range(int(k) - 1):
        out = np.kron(out, base)
    return Hypermatrix(out)


def _ppow(z, num, den):
    """Principal z**(num/den)."""
    z = complex(z)
    if z == 0:
        raise DegeneracyError("0 cannot be raised to a fractional power")
    return cmath.exp((num / den) * cmath.log(z))


def _check_z2_parameter(x):
    if x == 0 or abs(x ** 3 + 1) < 1e-12:
        raise DegeneracyError("parametrization is singular at x = %r "
                              "(x = 0 or x^3 = -1)" % (x,))


def z2_parametrization(x):
    """One-parameter family (Q, D) for the mod-2 adjacency decomposition.

    Q[:,:,0] = [[(x^3+1)^(-1/3), (x^-3+1)^(-1/3)], [-x, 1]]
    Q[:,:,1] = [[1, 1], [(x^3+1)^(-1/3), (x^-3+1)^(-1/3)]]
    D has nonzeros (-x^3)^(1/12), (-x^3)^(1/6), (-x^3)^(1/6), 1 on its
    scale pattern.  Principal branches throughout.
    """
    x = complex(x)
    _check_z2_parameter(x)
    f0 = _ppow(x ** 3 + 1, -1, 3)
    f1 = _ppow(x ** -3 + 1, -1, 3)
    q = np.empty((2, 2, 2), dtype=complex)
    q[:, :, 0] = [[f0, f1], [-x, 1.0]]
    q[:, :, 1] = [[1.0, 1.0], [f0, f1]]
    d = np.zeros((2, 2, 2), dtype=complex)
    d[0, 0, 0] = _ppow(-x ** 3, 1, 12)
    d[1, 0, 0] = _ppow(-x ** 3, 1, 6)
    d[0, 1, 1] = _ppow(-x ** 3, 1, 6)
    d[1, 1, 1] = 1.0
    return Hypermatrix(q), Hypermatrix(d)


def z2_equation_residual(x):
    """The scalar equation tying the parameter x to the mod-2 adjacency
    reconstruction (diagonal entry equals off-diagonal entry).  Principal
    branches everywhere; zero residual means x is a usable root."""
    x = complex(x)
    _check_z2_parameter(x)
    left = ((_ppow(-1.0, 5, 6) * _ppow(x, 7, 2)
             - _ppow(-1.0, 1, 3) * x ** 2)
            / (_ppow(x * x - x + 1.0, 1, 3) * _ppow(x + 1.0, 1, 3)))
    right = (x ** 6 + x * cmath.sqrt(-x)) / (x ** 3 + 1.0)
    return left - right


def _newton_step(z, tol, max_iter):
    for _ in range(max_iter):
        try:
            f = z2_equation_residual(z)
        except DegeneracyError:
            return None
        if abs(f) < tol:
            return z
        h = 1e-7 * (1.0 + abs(z))
        try:
            fp = (z2_equation_residual(z + h)
                  - z2_equation_residual(z - h)) / (2.0 * h)
        except DegeneracyError:
            return None
        if fp == 0 or not cmath.isfinite(fp):
            return None
        z = z - f / fp
        if not cmath.isfinite(z):
            return None
    try:
        f = z2_equation_residual(z)
    except DegeneracyError:
        return None
    return z if abs(f) < tol else None


def z2_find_root(tol=1e-8, max_iter=80):
    """Complex Newton on the scalar equation from a deterministic 8x8 grid
    of starts (moduli geomspace(0.1, 4), eight phases).  Returns the root
    with the smallest residual; start order breaks ties."""
    best = None
    best_f = None
    for r in np.geomspace(0.1, 4.0, 8):
        for p in range(8):
            start = complex(r) * cmath.exp(2j * cmath.pi * p / 8.0)
            z = _newton_step(start, tol, max_iter)
            if z is None:
                continue
            f = abs(z2_equation_residual(z))
            if best is None or f < best_f:
                best, best_f = z, f
    if best is None:
        raise DegeneracyError("no root of the scalar equation found below "
                              "%g" % tol)
    return best


@dataclass(frozen=True)
class Z2BranchSearch:
    x: complex
    ok: bool
    branch: tuple | None
    residual: float
    tested: tuple    # ((w12, w6a, w6b), residual) for every combination


def z2_branch_enumeration(x, tol=1e-6):
    """Scan all 12 x 6 x 6 root-of-unity multipliers on the fractional scale
    entries d000, d100, d011 and reconstruct with the same scaled factor in
    all three slots.  Best combination wins (ties: lexicographic)."""
    Q, D = z2_parametrization(x)
    target = group_adjacency_z2(1).array
    base = D.array
    tested = []
    best_branch = None
    best_res = float("inf")
    for a, b, c in itertools.product(range(12), range(6), range(6)):
        d = base.copy()
        d[0, 0, 0] *= cmath.exp(2j * cmath.pi * a / 12.0)
        d[1, 0, 0] *= cmath.exp(2j * cmath.pi * b / 6.0)
        d[0, 1, 1] *= cmath.exp(2j * cmath.pi * c / 6.0)
        Dh = Hypermatrix(d)
        fac = bm_product([Q, Dh, transpose(Dh)])
        rec = bm_product([fac, transpose_power(fac, 2), transpose(fac)])
        res = float(np.max(np.abs(rec.array - target)))
        tested.append(((a, b, c), res))
        if res < best_res:
            best_branch, best_res = (a, b, c), res
    ok = best_res < tol
    return Z2BranchSearch(x=complex(x), ok=ok,
                          branch=best_branch if ok else None,
                          residual=best_res, tested=tuple(tested))
