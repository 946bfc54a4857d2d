"""Structured hypermatrices: membership predicates, third-order DFT triples,
and odd-order side-2 Hadamard hypermatrices via the necklace graph.

The cyclic product underlying all the predicates here is
Prod(Q, Q^T^(m-1), ..., Q^T); factor s of the entry at i picks up the index
(i_s, j, i_{s+2}, ..., i_{s+m-1}) with j the contraction index.  That window
structure is what reduces the side-2 Hadamard equations to one +-1 variable
per binary window word, and those to an odd-degree subgraph problem on
necklaces.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from bmalg.core import (Hypermatrix, HypermatrixError, asarray, conjugate,
                        transpose_power)
from bmalg.products import bm_product, kron_delta, kronecker


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    residual: float

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class AdmissibilityResult:
    n: int
    admissible: bool
    witness: tuple | None


@dataclass(frozen=True)
class NecklaceConstraintGraph:
    vertices: tuple    # non-constant necklaces, lexicographic
    edges: tuple       # (vertex_a, vertex_b, window labels) with a < b
    window_assignment: dict  # window word -> +1/-1


class InadmissibleSideError(HypermatrixError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


def _require_cubic(A, what):
    if len(set(A.shape)) != 1:
        raise HypermatrixError("%s must be cubic, got shape %r" % (what, A.shape))


def cyclic_transpose_tuple(Q):
    """(Q, Q^T^(m-1), ..., Q^T) -- the operand tuple of the orthogonality
    product."""
    Q = Q if isinstance(Q, Hypermatrix) else Hypermatrix(Q)
    m = Q.order
    return [Q] + [transpose_power(Q, m - s) for s in range(1, m)]


def is_uncorrelated(operands, tol=1e-9):
    """True iff the cyclic product of the tuple is the Kronecker delta."""
    ops = [A if isinstance(A, Hypermatrix) else Hypermatrix(A) for A in operands]
    m = len(ops)
    for A in ops:
        if A.order != m:
            raise HypermatrixError("tuple of %d hypermatrices must have order %d"
                                   % (m, m))
        _require_cubic(A, "uncorrelated-tuple operand")
    n = ops[0].shape[0]
    for A in ops:
        if A.shape[0] != n:
            raise HypermatrixError("operands must share a side length")
    P = bm_product(ops)
    res = float(np.max(np.abs(P.array - kron_delta(m, n).array)))
    return CheckResult(ok=res <= tol, residual=res)


def is_orthogonal(Q, tol=1e-9):
    Q = Q if isinstance(Q, Hypermatrix) else Hypermatrix(Q)
    _require_cubic(Q, "orthogonality candidate")
    return is_uncorrelated(cyclic_transpose_tuple(Q), tol)


def is_unitary(U, tol=1e-9):
    """Even-order unitarity: alternate U and conj(U) around the cyclic
    product, conjugating the odd transpose powers."""
    U = U if isinstance(U, Hypermatrix) else Hypermatrix(U)
    _require_cubic(U, "unitarity candidate")
    m = U.order
    if m % 2 != 0:
        raise HypermatrixError("unitarity needs even order, got %d" % m)
    Ubar = conjugate(U)
    ops = [U]
    for s in range(1, m):
        base = Ubar if s % 2 == 1 else U
        ops.append(transpose_power(base, m - s))
    return is_uncorrelated(ops, tol)


# ---------------------------------------------------------------------------
# DFT constructions

def dft_matrix(n):
    """Unitary n x n DFT matrix [F]_{uv} = exp(2*pi*i*u*v/n)/sqrt(n)."""
    if n < 1:
        raise HypermatrixError("dft_matrix needs n >= 1")
    u = np.arange(n).reshape(n, 1)
    v = np.arange(n).reshape(1, n)
    return Hypermatrix(np.exp(2j * np.pi * u * v / n) / math.sqrt(n))


def check_dft_admissible(n):
    """Scan for a nontrivial root of 2(x^2+xy+y^2) = 0 mod n.

    The quadratic is the sum (u-v)^2+(v-w)^2+(u-w)^2 with x=u-v, y=v-w, which
    is what must avoid 0 mod n off the diagonal for the third-order DFT
    triple to work.  A root is a witness of inadmissibility; scanning y-major
    finds (n/2, 0) for even n.
    """
    if n < 2:
        raise HypermatrixError("admissibility is about n >= 2")
    for y in range(n):
        for x in range(n):
            if x == 0 and y == 0:
                continue
            if (2 * (x * x + x * y + y * y)) % n == 0:
                return AdmissibilityResult(n=n, admissible=False, witness=(x, y))
    return AdmissibilityResult(n=n, admissible=True, witness=None)


def dft_triple(n):
    """The third-order DFT triple (F, G, H), uncorrelated for admissible n.

    [F]_{u,t,w} = w_n^{t(u-w)^2}/n^(1/3) and cyclically for G, H, with
    w_n = exp(2*pi*i/n).  The product telescopes to a geometric sum over t
    whose exponent is (u-v)^2+(v-w)^2+(u-w)^2.
    """
    adm = check_dft_admissible(n)
    if not adm.admissible:
        raise InadmissibleSideError(
            "n=%d is not admissible: (x,y)=%r gives a nontrivial root"
            % (n, adm.witness), witness=adm.witness)
    scale = n ** (1.0 / 3.0)
    idx = np.arange(n)
    u = idx.reshape(n, 1, 1)
    v = idx.reshape(1, n, 1)
    w = idx.reshape(1, 1, n)
    t_mid = idx.reshape(1, n, 1)
    t_last = idx.reshape(1, 1, n)
    t_first = idx.reshape(n, 1, 1)
    tau = 2j * np.pi / n
    F = np.exp(tau * t_mid * (u - w) ** 2) / scale           # [F]_{u,t,w}
    G = np.exp(tau * t_last * (u - v) ** 2) / scale          # [G]_{u,v,t}
    H = np.exp(tau * t_first * (v - w) ** 2) / scale         # [H]_{t,v,w}
    return Hypermatrix(F), Hypermatrix(G), Hypermatrix(H)


# ---------------------------------------------------------------------------
# Hadamard hypermatrices

def _validate_pm1(H):
    arr = asarray(H)
    if np.any(arr.imag != 0.0) or np.any(np.abs(arr.real) != 1.0):
        raise HypermatrixError("Hadamard candidates need exact +-1 entries")
    return arr.real.astype(np.int64)


def _cyclic_product_int(signs):
    """The orthogonality-product entries of a +-1 hypermatrix, exactly."""
    m = signs.ndim
    n = signs.shape[0]
    out = np.zeros(signs.shape, dtype=np.int64)
    for i in np.ndindex(signs.shape):
        acc = 0
        for j in range(n):
            term = 1
            for s in range(m):
                pos = tuple(j if t == 1 else i[(s + t) % m]
                            for t in range(m))
                term *= signs[pos]
            acc += term
        out[i] = acc
    return out


def is_hadamard(H, tol=0):
    """Exact side-n criterion: cyclic product equals n on the all-equal
    diagonal and 0 elsewhere."""
    H = H if isinstance(H, Hypermatrix) else Hypermatrix(H)
    _require_cubic(H, "Hadamard candidate")
    signs = _validate_pm1(H)
    n = signs.shape[0]
    prod = _cyclic_product_int(signs)
    target = np.zeros_like(prod)
    target[tuple([np.arange(n)] * signs.ndim)] = n
    return bool(np.max(np.abs(prod - target)) <= tol)


def minimal_period(word):
    """Smallest p with word equal to its rotation by p (so p divides len)."""
    m = len(word)
    for p in range(1, m + 1):
        if word == word[p:] + word[:p]:
            return p
    return m


def necklace_representative(word):
    return min(word[i:] + word[:i] for i in range(len(word)))


def enumerate_necklaces(m):
    """All binary necklaces of length m (lexicographically minimal rotations),
    sorted."""
    out = []
    for bits in itertools.product("01", repeat=m):
        w = "".join(bits)
        if w == necklace_representative(w):
            out.append(w)
    return out


def necklace_count(m):
    """Burnside count (1/m) * sum_{d | m} phi(d) 2^(m/d)."""
    total = 0
    for d in range(1, m + 1):
        if m % d == 0:
            phi = sum(1 for r in range(1, d + 1) if math.gcd(r, d) == 1)
            total += phi * 2 ** (m // d)
    return total // m


def _rot_left(word):
    return word[1:] + word[:1]


def _gf2_solve(rows, ncols):
    """Solve A x = 1 over GF(2); rows are column-index bitmasks.  Returns a
    solution bitmask with free variables 0, or None if infeasible."""
    aug = [(r, 1) for r in rows]
    pivots = []
    for c in range(ncols):
        pr = None
        for i in range(len(aug)):
            if i not in [p[0] for p in pivots] and (aug[i][0] >> c) & 1:
                pr = i
                break
        if pr is None:
            continue
        for i in range(len(aug)):
            if i != pr and (aug[i][0] >> c) & 1:
                aug[i] = (aug[i][0] ^ aug[pr][0], aug[i][1] ^ aug[pr][1])
        pivots.append((pr, c))
    x = 0
    for pr, c in pivots:
        if aug[pr][1]:
            x |= 1 << c
    for i in range(len(aug)):
        if i not in [p[0] for p in pivots] and aug[i][1]:
            return None
    return x


def necklace_constraint_graph(m):
    """Build the window/necklace constraint structure for odd m and solve it.

    Vertices are the non-constant necklaces; window w labels the edge between
    the necklaces of w+'0' and w+'1'.  A vertex's constraint asks the product
    of its incident window variables to be -1, so variables set to -1 must
    form an odd-degree spanning pattern.  Pairs of vertices (lexicographic
    order) are joined by shortest paths whose XOR gives such a subgraph; one
    window per chosen edge (the smallest label) goes to -1.
    """
    if m % 2 == 0 or m < 3:
        raise HypermatrixError("the necklace construction needs odd m >= 3")
    vertices = tuple(v for v in enumerate_necklaces(m)
                     if len(set(v)) > 1)
    edge_labels = {}
    for bits in itertools.product("01", repeat=m - 1):
        w = "".join(bits)
        if len(set(w)) == 1:
            continue  # constant windows are gauge-fixed to +1
        a = necklace_representative(w + "0")
        b = necklace_representative(w + "1")
        key = (a, b) if a < b else (b, a)
        edge_labels.setdefault(key, []).append(w)
    edges = tuple((a, b, tuple(sorted(ws)))
                  for (a, b), ws in sorted(edge_labels.items()))

    adj = {v: set() for v in vertices}
    for a, b, _ in edges:
        adj[a].add(b)
        adj[b].add(a)

    # connected components, by BFS from the smallest unvisited vertex
    comp_of = {}
    comps = []
    for v in vertices:
        if v in comp_of:
            continue
        comp = []
        queue = [v]
        comp_of[v] = len(comps)
        while queue:
            u = queue.pop(0)
            comp.append(u)
            for nb in sorted(adj[u]):
                if nb not in comp_of:
                    comp_of[nb] = len(comps)
                    queue.append(nb)
        comps.append(sorted(comp))

    chosen_edges = set()
    gf2_windows = set()
    for comp in comps:
        if len(comp) % 2 == 0:
            # pair consecutive vertices, join by BFS shortest paths, XOR
            for a, b in zip(comp[0::2], comp[1::2]):
                path = _bfs_path(adj, a, b)
                for e in path:
                    chosen_edges ^= {e}
        else:
            # fall back to solving the +-1 window system over GF(2)
            cols = sorted({w for va, vb, ws in edges
                           if va in comp for w in ws})
            col_index = {w: i for i, w in enumerate(cols)}
            rows = []
            for v in comp:
                mask = 0
                for va, vb, ws in edges:
                    if v in (va, vb):
                        for w in ws:
                            mask |= 1 << col_index[w]
                rows.append(mask)
            x = _gf2_solve(rows, len(cols))
            if x is None:
                raise HypermatrixError(
                    "window system infeasible on a component of %d vertices"
                    % len(comp))
            for w, i in col_index.items():
                if (x >> i) & 1:
                    gf2_windows.add(w)

    assignment = {}
    for bits in itertools.product("01", repeat=m - 1):
        assignment["".join(bits)] = 1
    for a, b, ws in edges:
        key = (a, b)
        if key in chosen_edges:
            assignment[ws[0]] = -1  # smallest label of the chosen edge
    for w in gf2_windows:
        assignment[w] = -1

    graph = NecklaceConstraintGraph(vertices=vertices, edges=edges,
                                    window_assignment=assignment)
    _verify_window_assignment(graph)
    return graph


def _bfs_path(adj, a, b):
    """Shortest path a..b as a set of (u,v) edges with u < v; ties broken by
    exploring neighbors in lexicographic order."""
    if a == b:
        return set()
    parent = {a: None}
    queue = [a]
    while queue:
        u = queue.pop(0)
        for nb in sorted(adj[u]):
            if nb not in parent:
                parent[nb] = u
                if nb == b:
                    queue = []
                    break
                queue.append(nb)
    if b not in parent:
        raise HypermatrixError("vertices %s and %s are disconnected" % (a, b))
    path = set()
    v = b
    while parent[v] is not None:
        u = parent[v]
        path.add((u, v) if u < v else (v, u))
        v = u
    return path


def _verify_window_assignment(graph):
    for v in graph.vertices:
        prod = 1
        for a, b, ws in graph.edges:
            if v in (a, b):
                for w in ws:
                    prod *= graph.window_assignment[w]
        if prod != -1:
            raise HypermatrixError(
                "window assignment violates the constraint at %s" % v)


def hadamard_side2(m):
    """An order-m side-2 +-1 hypermatrix satisfying the Hadamard criterion.

    Only odd m is possible.  The window variables solved on the necklace
    graph are ratios over contiguous windows of each word; the entry at
    (i1, c, i2, ..., i_{m-1}) is +1 for c=1 and the rotated window variable
    for c=0, matching the factor windows of the cyclic product.
    """
    if m < 3 or m % 2 == 0:
        raise HypermatrixError(
            "no order-%d Hadamard hypermatrix of side 2 exists; "
            "even orders are impossible at side 2" % m)
    graph = necklace_constraint_graph(m)
    arr = np.ones((2,) * m, dtype=np.complex128)
    for bits in itertools.product((0, 1), repeat=m - 1):
        u = "".join(str(b) for b in bits)
        val = graph.window_assignment[_rot_left(u)]
        idx = (bits[0], 0) + bits[1:]
        arr[idx] = val
    H = Hypermatrix(arr)
    if not is_hadamard(H):
        raise HypermatrixError("internal check failed: construction at m=%d "
                               "is not Hadamard" % m)
    return H


def hadamard_kron_power(seed, k):
    """k-fold Kronecker power of a Hadamard hypermatrix (side multiplies)."""
    seed = seed if isinstance(seed, Hypermatrix) else Hypermatrix(seed)
    if k < 1:
        raise HypermatrixError("k must be >= 1")
    if not is_hadamard(seed):
        raise HypermatrixError("seed fails the Hadamard criterion")
    out = seed
    for _ in range(k - 1):
        out = kronecker(out, seed)
    return out


def exhaustive_hadamard_search(m, side=2):
    """Scan every +-1 assignment of an order-m side-`side` hypermatrix and
    return the first Hadamard one (sign patterns in lexicographic order,
    +1 before -1 per cell), or None."""
    cells = side ** m
    if cells > 16:
        raise HypermatrixError(
            "exhaustive search needs side^m <= 16 cells (2^%d assignments); "
            "got side^m = %d" % (cells, cells))
    npat = 1 << cells
    codes = np.arange(npat, dtype=np.uint32)
    # signs[p, c] = +-1 for pattern p, flat cell c (bit 0 = last index fastest)
    bits = (codes[:, None] >> np.arange(cells)[None, ::-1]) & 1
    signs = 1 - 2 * bits.astype(np.int64)

    shape = (side,) * m
    ok = np.ones(npat, dtype=bool)
    for i in np.ndindex(shape):
        target = side if len(set(i)) == 1 else 0
        acc = np.zeros(npat, dtype=np.int64)
        for j in range(side):
            term = np.ones(npat, dtype=np.int64)
            for s in range(m):
                pos = tuple(j if t == 1 else i[(s + t) % m] for t in range(m))
                flat = int(np.ravel_multi_index(pos, shape))
                term = term * signs[:, flat]
            acc += term
        ok &= acc == target
    hits = np.nonzero(ok)[0]
    if hits.size == 0:
        return None
    return Hypermatrix(signs[hits[0]].reshape(shape).astype(np.complex128))
