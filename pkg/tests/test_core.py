import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bmalg import core


def _random_hm(rng, shape):
    return core.Hypermatrix(rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def test_constructor_copies_and_freezes():
    buf = np.ones((2, 2), dtype=np.complex128)
    A = core.Hypermatrix(buf)
    buf[0, 0] = 5.0
    assert A[0, 0] == 1.0
    with pytest.raises(ValueError):
        A.array[0, 0] = 3.0


def test_scalar_input_becomes_order_1():
    A = core.Hypermatrix(3.0)
    assert A.shape == (1,)
    assert A.order == 1


def test_vector_shape():
    x = core.vector([1, 2, 3], order=3)
    assert x.shape == (3, 1, 1)
    assert x[1, 0, 0] == 2.0


# --- transpose ---------------------------------------------------------------

def _transpose_oracle(arr):
    # result[i1,...,im] = arr[im, i1, ..., i(m-1)], written as explicit loops
    m = arr.ndim
    out = np.zeros(arr.shape[1:] + arr.shape[:1], dtype=complex)
    for idx in np.ndindex(out.shape):
        src = (idx[-1],) + idx[:-1]
        out[idx] = arr[src]
    return out


def test_transpose_matrix_case():
    M = core.Hypermatrix([[1, 2, 3], [4, 5, 6]])
    T = core.transpose(M)
    assert T.shape == (3, 2)
    assert np.array_equal(T.array, M.array.T)


def test_transpose_index_map_oracle():
    rng = np.random.default_rng(7)
    for shape in [(2, 3), (2, 3, 4), (3, 2, 4, 2)]:
        A = _random_hm(rng, shape)
        T = core.transpose(A)
        assert T.shape == shape[1:] + shape[:1]
        assert np.array_equal(T.array, _transpose_oracle(A.array))


def test_transpose_specific_entry_moves():
    rng = np.random.default_rng(0)
    A = _random_hm(rng, (2, 3, 4))
    T = core.transpose(A)
    assert T[2, 3, 1] == A[1, 2, 3]


def test_transpose_order3_three_times_identity_bit_exact():
    rng = np.random.default_rng(1)
    A = _random_hm(rng, (3, 3, 3))
    B = core.transpose(core.transpose(core.transpose(A)))
    assert np.array_equal(B.array, A.array)


def test_transpose_rejects_order_1():
    with pytest.raises(core.HypermatrixError):
        core.transpose(core.Hypermatrix([1, 2, 3]))


def test_transpose_power_matches_iteration():
    rng = np.random.default_rng(2)
    A = _random_hm(rng, (2, 3, 4, 2))
    B = A
    for p in range(9):
        assert np.array_equal(core.transpose_power(A, p).array, B.array)
        B = core.transpose(B)


@given(st.integers(2, 4), st.integers(0, 12), st.integers(0, 12), st.data())
@settings(max_examples=60, deadline=None)
def test_transpose_power_congruence(m, i, j, data):
    # transpose^i == transpose^j whenever i == j mod m
    if i % m != j % m:
        j = i  # force congruence, the property is about equal residues
    shape = tuple(data.draw(st.integers(1, 3)) for _ in range(m))
    entries = data.draw(st.lists(
        st.floats(-5, 5, allow_nan=False), min_size=int(np.prod(shape)),
        max_size=int(np.prod(shape))))
    A = core.Hypermatrix(np.asarray(entries).reshape(shape))
    assert np.array_equal(core.transpose_power(A, i).array,
                          core.transpose_power(A, j).array)


# --- slicing -----------------------------------------------------------------

def test_slice_keeps_axis():
    rng = np.random.default_rng(3)
    A = _random_hm(rng, (4, 2, 3))
    S = core.slice(A, 1, 1)
    assert S.shape == (4, 1, 3)
    assert np.array_equal(S.array, A.array[:, 1:2, :])


def test_slice_vector_entry():
    x = core.vector([10, 20, 30], order=3)
    s = core.slice(x, 0, 2)
    assert s.shape == (1, 1, 1)
    assert s[0, 0, 0] == 30.0


def test_slice_reassemble_round_trip():
    rng = np.random.default_rng(4)
    A = _random_hm(rng, (2, 3, 2))
    for axis in range(3):
        parts = [core.slice(A, axis, t).array for t in range(A.shape[axis])]
        assert np.array_equal(np.concatenate(parts, axis=axis), A.array)


def test_slice_bounds():
    A = core.Hypermatrix(np.zeros((2, 2)))
    with pytest.raises(IndexError):
        core.slice(A, 2, 0)
    with pytest.raises(IndexError):
        core.slice(A, 0, 2)


# --- entrywise ops -----------------------------------------------------------

def test_hadamard_masks_diagonal():
    mask = core.Hypermatrix(np.ones((2, 2)) - np.eye(2))
    B = core.Hypermatrix([[5, 6], [7, 8]])
    H = core.hadamard_entrywise(mask, B)
    assert H.tolist() == [[0, 6], [7, 0]]


def test_hadamard_identity_and_mismatch():
    rng = np.random.default_rng(5)
    A = _random_hm(rng, (2, 2, 2))
    ones = core.Hypermatrix(np.ones((2, 2, 2)))
    assert core.max_abs_diff(core.hadamard_entrywise(A, ones), A) == 0.0
    with pytest.raises(core.ShapeMismatchError):
        core.hadamard_entrywise(A, core.Hypermatrix(np.ones((2, 2))))


def test_entrywise_plumbing():
    A = core.Hypermatrix([[1j]])
    assert core.conjugate(A)[0, 0] == -1j
    assert core.scale(A, 2)[0, 0] == 2j
    B = core.add(A, A)
    assert B[0, 0] == 2j
    ones = core.Hypermatrix(np.ones((2, 2, 2)))
    assert core.norm_l2(ones) == pytest.approx(np.sqrt(8.0))
    assert core.max_abs_diff(A, A) == 0.0


# --- JSON --------------------------------------------------------------------

def test_json_round_trip_bit_exact():
    rng = np.random.default_rng(6)
    A = _random_hm(rng, (2, 3, 2))
    B = core.loads(core.dumps(A))
    assert B.shape == A.shape
    assert np.array_equal(B.array, A.array)


def test_json_im_omitted_when_real():
    A = core.Hypermatrix([[1.5, -2.25], [0.0, 3.0]])
    d = core.to_json_dict(A)
    assert "im" not in d
    B = core.from_json_dict(d)
    assert np.array_equal(B.array, A.array)


def test_json_shape_entry_count_checked():
    with pytest.raises(core.HypermatrixError):
        core.from_json_dict({"shape": [2, 2], "re": [1, 2, 3]})


def test_json_format_fields():
    A = core.Hypermatrix([[0, 1j], [1, 0]])
    d = json.loads(core.dumps(A))
    assert sorted(d.keys()) == ["im", "re", "shape"]
    assert d["shape"] == [2, 2]
    assert d["re"] == [0.0, 0.0, 1.0, 0.0]
    assert d["im"] == [0.0, 1.0, 0.0, 0.0]


@given(st.lists(st.floats(allow_nan=False, allow_infinity=False, width=64),
                min_size=1, max_size=12),
       st.lists(st.floats(allow_nan=False, allow_infinity=False, width=64),
                min_size=1, max_size=12))
@settings(max_examples=80, deadline=None)
def test_json_round_trip_property(re, im):
    n = min(len(re), len(im))
    arr = np.asarray(re[:n]) + 1j * np.asarray(im[:n])
    A = core.Hypermatrix(arr)
    B = core.loads(core.dumps(A))
    assert np.array_equal(B.array, A.array)


def test_file_round_trip(tmp_path):
    A = core.Hypermatrix([[1, 2], [3, 4]])
    p = tmp_path / "a.json"
    core.save(A, p)
    assert np.array_equal(core.load(p).array, A.array)
