"""Dense complex hypermatrix values and entrywise plumbing.

A hypermatrix of order m is a dense array of complex numbers indexed by
m-tuples.  Vectors are carried around with shape (n, 1, ..., 1) so that the
order is always explicit.  Everything here is immutable: operations hand back
new values and never touch their arguments.

Contents: the Hypermatrix wrapper, cyclic transpose, axis slicing, entrywise
arithmetic, norms, and the JSON wire format used across the package.
"""

from __future__ import annotations

import json

import numpy as np

DEFAULT_TOL = 1e-9

# An index tuple is just a tuple of non-negative ints, one per axis.
IndexTuple = tuple


class HypermatrixError(ValueError):
    pass


class ShapeMismatchError(HypermatrixError):
    pass


class Hypermatrix:
    """Immutable dense complex array of order m >= 1.

    Entries are stored row-major (first index slowest) as complex128.  The
    constructor copies its input, so the caller's buffer is never aliased.
    """

    __slots__ = ("_array",)

    def __init__(self, data):
        arr = np.array(data, dtype=np.complex128, order="C")
        if arr.ndim == 0:
            arr = arr.reshape(1)
        if min(arr.shape) < 1:
            raise HypermatrixError("empty axes are not allowed: shape %r" % (arr.shape,))
        arr.setflags(write=False)
        self._array = arr

    @property
    def array(self):
        """Read-only ndarray view of the entries."""
        return self._array

    @property
    def shape(self):
        return self._array.shape

    @property
    def order(self):
        return self._array.ndim

    @property
    def size(self):
        return self._array.size

    def __getitem__(self, idx):
        return complex(self._array[idx])

    def __repr__(self):
        return "Hypermatrix(shape=%r)" % (self.shape,)

    def tolist(self):
        return self._array.tolist()


def asarray(A):
    """ndarray of A's entries (read-only), accepting Hypermatrix or array-like."""
    if isinstance(A, Hypermatrix):
        return A.array
    return np.asarray(A, dtype=np.complex128)


def vector(values, order=1):
    """Wrap a 1-d sequence as a shape (n, 1, ..., 1) hypermatrix of the given order."""
    arr = np.asarray(values, dtype=np.complex128).reshape(-1)
    return Hypermatrix(arr.reshape((arr.size,) + (1,) * (order - 1)))


def transpose(A):
    """Cyclic transpose: result[i1,...,im] = A[im,i1,...,i(m-1)].

    Shifts every axis one step forward, so the shape goes from
    (n1,...,nm) to (n2,...,nm,n1).  Applying it m times is the identity.
    """
    A = _as_hm(A)
    m = A.order
    if m < 2:
        raise HypermatrixError("transpose needs order >= 2, got order %d" % m)
    return Hypermatrix(np.transpose(A.array, tuple(range(1, m)) + (0,)))


def transpose_power(A, p):
    """p-fold cyclic transpose (p may be any integer; only p mod m matters)."""
    A = _as_hm(A)
    m = A.order
    if m < 2:
        raise HypermatrixError("transpose needs order >= 2, got order %d" % m)
    p = p % m
    if p == 0:
        return Hypermatrix(A.array)
    # composing the single-step permutation p times sends result axis k to
    # source axis (k + p) mod m
    return Hypermatrix(np.transpose(A.array, tuple((k + p) % m for k in range(m))))


def slice(A, axis, t):
    """Keep-dimension slice: fix index `t` along `axis`, leaving a size-1 axis."""
    A = _as_hm(A)
    m = A.order
    if not 0 <= axis < m:
        raise IndexError("axis %d out of range for order %d" % (axis, m))
    if not 0 <= t < A.shape[axis]:
        raise IndexError("index %d out of range for axis %d of length %d"
                         % (t, axis, A.shape[axis]))
    return Hypermatrix(np.take(A.array, [t], axis=axis))


def hadamard_entrywise(A, B):
    """Entrywise (Hadamard) product of two same-shape hypermatrices."""
    A, B = _as_hm(A), _as_hm(B)
    _require_same_shape(A, B, "hadamard_entrywise")
    return Hypermatrix(A.array * B.array)


def conjugate(A):
    return Hypermatrix(np.conj(_as_hm(A).array))


def scale(A, c):
    return Hypermatrix(_as_hm(A).array * complex(c))


def add(A, B):
    A, B = _as_hm(A), _as_hm(B)
    _require_same_shape(A, B, "add")
    return Hypermatrix(A.array + B.array)


def norm_l2(A):
    """sqrt of the sum of squared entry moduli."""
    return float(np.linalg.norm(_as_hm(A).array.reshape(-1)))


def max_abs_diff(A, B):
    A, B = _as_hm(A), _as_hm(B)
    _require_same_shape(A, B, "max_abs_diff")
    return float(np.max(np.abs(A.array - B.array)))


def approx_equal(A, B, tol=DEFAULT_TOL):
    return max_abs_diff(A, B) <= tol


def _as_hm(A):
    return A if isinstance(A, Hypermatrix) else Hypermatrix(A)


def _require_same_shape(A, B, opname):
    if A.shape != B.shape:
        raise ShapeMismatchError("%s: shapes %r and %r differ"
                                 % (opname, A.shape, B.shape))


# ---------------------------------------------------------------------------
# JSON wire format
#
# {"shape":[n1,...,nm], "re":[...], "im":[...]}  with re/im flat row-major;
# "im" is dropped when identically zero.  json round-trips binary64 exactly.

def to_json_dict(A):
    A = _as_hm(A)
    flat = A.array.reshape(-1)
    d = {"shape": list(A.shape), "re": [float(v) for v in flat.real]}
    if np.any(flat.imag != 0.0):
        d["im"] = [float(v) for v in flat.imag]
    return d


def from_json_dict(d):
    shape = tuple(int(n) for n in d["shape"])
    size = 1
    for n in shape:
        size *= n
    re = np.asarray(d["re"], dtype=np.float64)
    if re.size != size:
        raise HypermatrixError("re has %d entries, shape %r wants %d"
                               % (re.size, shape, size))
    if "im" in d and d["im"] is not None:
        im = np.asarray(d["im"], dtype=np.float64)
        if im.size != size:
            raise HypermatrixError("im has %d entries, shape %r wants %d"
                                   % (im.size, shape, size))
    else:
        im = np.zeros(size)
    return Hypermatrix((re + 1j * im).reshape(shape))


def dumps(A):
    return json.dumps(to_json_dict(A))


def loads(s):
    return from_json_dict(json.loads(s))


def save(A, path):
    with open(path, "w") as fh:
        fh.write(dumps(A))


def load(path):
    with open(path) as fh:
        return loads(fh.read())
