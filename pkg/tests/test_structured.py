import itertools
import math

import numpy as np
import pytest

from bmalg import core, products, structured


# --- predicates --------------------------------------------------------------

def test_delta_tuple_uncorrelated():
    d = products.kron_delta(3, 2)
    res = structured.is_uncorrelated([d, d, d])
    assert res.ok and res.residual == 0.0


def test_all_ones_not_uncorrelated():
    ones = np.ones((2, 2, 2))
    res = structured.is_uncorrelated([ones, ones, ones])
    assert not res
    assert res.residual == 2.0


def test_delta_orthogonal():
    assert structured.is_orthogonal(products.kron_delta(3, 2)).ok


def test_rotation_matrix_orthogonal():
    th = 0.7
    R = [[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]]
    res = structured.is_orthogonal(np.asarray(R))
    assert res.ok and res.residual < 1e-15


def test_identity_unitary_and_odd_order_rejected():
    assert structured.is_unitary(np.eye(3)).ok
    with pytest.raises(core.HypermatrixError):
        structured.is_unitary(np.ones((2, 2, 2)))


def test_unnormalized_sylvester_not_unitary():
    res = structured.is_unitary(np.array([[1.0, 1.0], [1.0, -1.0]]))
    assert not res.ok
    assert abs(res.residual - 1.0) < 1e-12


# --- DFT matrix --------------------------------------------------------------

def test_dft_matrix_small():
    assert np.allclose(structured.dft_matrix(1).array, [[1.0]])
    F2 = structured.dft_matrix(2).array
    assert np.allclose(F2, np.array([[1, 1], [1, -1]]) / math.sqrt(2))


def test_dft_matrix_unitary():
    for n in (2, 3, 4, 7):
        F = structured.dft_matrix(n)
        res = structured.is_unitary(F, tol=1e-12)
        assert res.ok, res.residual
    F = structured.dft_matrix(4).array
    assert np.max(np.abs(F @ F.conj().T - np.eye(4))) < 1e-13


# --- admissibility -----------------------------------------------------------

def _has_nontrivial_root_x2_3y2(n):
    # independent oracle on the x^2 + 3 y^2 form
    for x in range(n):
        for y in range(n):
            if (x, y) != (0, 0) and (x * x + 3 * y * y) % n == 0:
                return True
    return False


def test_admissibility_examples():
    assert structured.check_dft_admissible(5).admissible
    r7 = structured.check_dft_admissible(7)
    assert not r7.admissible and r7.witness == (2, 1)
    r6 = structured.check_dft_admissible(6)
    assert not r6.admissible and r6.witness == (3, 0)


def test_admissibility_witness_verifies():
    for n in range(2, 40):
        r = structured.check_dft_admissible(n)
        if r.admissible:
            assert r.witness is None
        else:
            x, y = r.witness
            assert (2 * (x * x + x * y + y * y)) % n == 0
            assert (x, y) != (0, 0)


def test_admissibility_matches_residue_oracle():
    for n in range(2, 101):
        r = structured.check_dft_admissible(n)
        assert r.admissible == (not _has_nontrivial_root_x2_3y2(n)), n


def test_even_n_never_admissible():
    for n in range(2, 60, 2):
        r = structured.check_dft_admissible(n)
        assert not r.admissible
        assert r.witness == (n // 2, 0) or r.witness[1] == 0


def test_admissible_primes_are_5_or_11_mod_12():
    def is_prime(p):
        return p > 1 and all(p % d for d in range(2, int(p ** 0.5) + 1))
    for p in range(2, 200):
        if not is_prime(p):
            continue
        r = structured.check_dft_admissible(p)
        # -3 must be a non-residue mod p for admissibility
        legendre_ok = p > 3 and pow(-3 % p, (p - 1) // 2, p) == p - 1
        assert r.admissible == legendre_ok, p
        if p < 100:
            assert r.admissible == (p % 12 in (5, 11)), p


# --- DFT triple --------------------------------------------------------------

def _triple_product_oracle(n):
    # direct geometric-sum evaluation, independent of bm_product
    out = np.zeros((n, n, n), dtype=complex)
    for u in range(n):
        for v in range(n):
            for w in range(n):
                s = 0j
                for t in range(n):
                    e = (u - w) ** 2 + (u - v) ** 2 + (v - w) ** 2
                    s += np.exp(2j * np.pi * t * e / n)
                out[u, v, w] = s / n
    return out


def test_dft_triple_n5():
    F, G, H = structured.dft_triple(5)
    P = products.bm_product([F, G, H])
    assert core.max_abs_diff(P, products.kron_delta(3, 5)) < 1e-9
    assert np.max(np.abs(P.array - _triple_product_oracle(5))) < 1e-12


def test_dft_triple_uncorrelated_small_admissible():
    for n in range(2, 31):
        if structured.check_dft_admissible(n).admissible:
            triple = structured.dft_triple(n)
            assert structured.is_uncorrelated(triple, tol=1e-9).ok, n


def test_dft_triple_rejects_inadmissible():
    with pytest.raises(structured.InadmissibleSideError) as exc:
        structured.dft_triple(7)
    assert exc.value.witness == (2, 1)


# --- necklaces ---------------------------------------------------------------

def test_necklaces_m3():
    assert structured.enumerate_necklaces(3) == ["000", "001", "011", "111"]


def test_necklaces_m5_nonconstant():
    nc = [v for v in structured.enumerate_necklaces(5) if len(set(v)) > 1]
    assert nc == ["00001", "00011", "00101", "00111", "01011", "01111"]


def test_necklace_burnside_counts():
    for m in range(1, 13):
        assert len(structured.enumerate_necklaces(m)) == structured.necklace_count(m)


def test_nonconstant_necklace_count_even_for_odd_m():
    for m in range(3, 14, 2):
        assert (structured.necklace_count(m) - 2) % 2 == 0


def test_period_lemma_exhaustive():
    # if a word agrees with its p-shift everywhere except possibly position 0,
    # its minimal period divides p
    for m in range(2, 11):
        for bits in itertools.product("01", repeat=m):
            w = "".join(bits)
            for p in range(1, m):
                if all(w[i] == w[(i - p) % m] for i in range(1, m)):
                    assert p % structured.minimal_period(w) == 0, (w, p)


# --- Hadamard ----------------------------------------------------------------

def _paper_example_222():
    arr = np.ones((2, 2, 2))
    arr[1, 0, 0] = -1.0
    return core.Hypermatrix(arr)


def test_example_222_is_hadamard():
    H = _paper_example_222()
    assert structured.is_hadamard(H)
    # slices: [:,:,0] = [[1,1],[-1,1]], [:,:,1] all ones
    assert H.array[:, :, 0].real.tolist() == [[1, 1], [-1, 1]]
    assert H.array[:, :, 1].real.tolist() == [[1, 1], [1, 1]]


def test_sylvester_2x2_is_hadamard():
    assert structured.is_hadamard(np.array([[1.0, 1.0], [1.0, -1.0]]))


def test_all_ones_2x2_not_hadamard():
    assert not structured.is_hadamard(np.ones((2, 2)))


def test_is_hadamard_validates_entries():
    with pytest.raises(core.HypermatrixError):
        structured.is_hadamard(np.ones((2, 2)) * 0.5)


def test_graph_m3():
    g = structured.necklace_constraint_graph(3)
    assert g.vertices == ("001", "011")
    assert len(g.edges) == 1
    a, b, ws = g.edges[0]
    assert (a, b) == ("001", "011")
    assert set(ws) == {"01", "10"}


def test_hadamard_side2_m3_matches_known_example():
    H = structured.hadamard_side2(3)
    assert structured.is_hadamard(H)
    assert np.array_equal(H.array.real, _paper_example_222().array.real)


def test_hadamard_side2_m5_matching():
    g = structured.necklace_constraint_graph(5)
    neg = sorted(w for w, v in g.window_assignment.items() if v == -1)
    assert neg == ["0001", "1001", "1011"]
    # six vertices, each constraint satisfied (checked on construction),
    # and every non-constant window labels exactly one edge
    counts = {}
    for _, _, ws in g.edges:
        for w in ws:
            counts[w] = counts.get(w, 0) + 1
    assert all(c == 1 for c in counts.values())
    assert len(counts) == 2 ** 4 - 2


def test_hadamard_side2_odd_orders():
    for m in (3, 5, 7):
        H = structured.hadamard_side2(m)
        assert H.shape == (2,) * m
        assert structured.is_hadamard(H)


def test_hadamard_side2_even_rejected():
    with pytest.raises(core.HypermatrixError):
        structured.hadamard_side2(4)


def test_window_edge_invariants():
    for m in (3, 5, 7):
        g = structured.necklace_constraint_graph(m)
        expected_vertices = structured.necklace_count(m) - 2
        assert len(g.vertices) == expected_vertices
        seen = {}
        for _, _, ws in g.edges:
            for w in ws:
                seen[w] = seen.get(w, 0) + 1
        assert all(c == 1 for c in seen.values())
        assert len(seen) == 2 ** (m - 1) - 2


def test_hadamard_kron_power():
    syl = np.array([[1.0, 1.0], [1.0, -1.0]])
    H8 = structured.hadamard_kron_power(syl, 3)
    assert H8.shape == (8, 8)
    assert structured.is_hadamard(H8)

    H3 = structured.hadamard_side2(3)
    H4 = structured.hadamard_kron_power(H3, 2)
    assert H4.shape == (4, 4, 4)
    assert structured.is_hadamard(H4)

    same = structured.hadamard_kron_power(H3, 1)
    assert np.array_equal(same.array, H3.array)


def test_hadamard_kron_power_rejects_bad_seed():
    with pytest.raises(core.HypermatrixError):
        structured.hadamard_kron_power(np.ones((2, 2)), 2)


def test_exhaustive_search_m3_finds_witness():
    H = structured.exhaustive_hadamard_search(3)
    assert H is not None
    assert structured.is_hadamard(H)


def test_exhaustive_search_m2():
    H = structured.exhaustive_hadamard_search(2)
    assert H is not None
    assert structured.is_hadamard(H)


def test_exhaustive_search_too_large_rejected():
    with pytest.raises(core.HypermatrixError):
        structured.exhaustive_hadamard_search(5)
