import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cantordiff.spectrum import (
    CantorSpec,
    ColumnId,
    TriangleAddress,
    column_of,
    correlations,
    digits,
    dimension,
    expectation_matrix,
    gamma_at,
    higher_order,
    iter_column_sums,
    level1_matrices,
    pf_eigenvalue,
    signed_offset,
    word_matrix,
    word_products,
)

from oracles import gamma_direct, geometric_column, lifted_vector, level1_matrix_by_geometry, matmul2

prob = st.floats(0.0, 1.0, allow_nan=False)


@st.composite
def specs(draw, min_M=2, max_M=6, two=None):
    M = draw(st.integers(min_M, max_M))
    p = draw(st.lists(prob, min_size=M, max_size=M))
    use_q = draw(st.booleans()) if two is None else two
    q = draw(st.lists(prob, min_size=M, max_size=M)) if use_q else None
    return CantorSpec.from_probs(p, q)


# --- CantorSpec ----------------------------------------------------------


def test_spec_flags_and_second_vector():
    s = CantorSpec.from_probs([1, 0, 1, 0.3])
    assert s.M == 4 and s.second == s.p and not s.two_vector
    assert s.is_supercritical and not s.is_deterministic
    t = CantorSpec.from_probs([1, 0], [0, 1])
    assert t.two_vector and t.second == (0.0, 1.0)
    assert not t.is_supercritical and t.is_deterministic


@pytest.mark.parametrize(
    "p, q",
    [([1.2, 0.5], None), ([-0.1, 1], None), ([0.5, 0.5], [0.5]), ([float("nan"), 1], None), ([1], None)],
)
def test_spec_rejects_invalid_input(p, q):
    with pytest.raises(ValueError):
        CantorSpec.from_probs(p, q)


def test_spec_csv_and_json_forms():
    s = CantorSpec.from_csv("1,0,1,0.3")
    assert s == CantorSpec.from_probs([1, 0, 1, 0.3])
    assert CantorSpec.from_json(s.to_json()) == s
    assert CantorSpec.from_json('{"M": 4, "p": [1,0,1,0.3], "q": null}') == s
    two = CantorSpec.from_csv("1,0", "0,1")
    assert CantorSpec.from_json(two.to_json()) == two
    with pytest.raises(ValueError):
        CantorSpec.from_csv("1,0", "1,0,1")
    with pytest.raises(ValueError):
        CantorSpec.from_csv("1,x,0")


# --- correlations -------------------------------------------------------


@pytest.mark.parametrize(
    "p, q, expected",
    [
        ([1, 0, 1, 0.5], None, [2.25, 1.0, 2.0, 1.0]),
        ([1, 0, 0.75], None, [1.5625, 0.75, 0.75]),
        ([0, 0], None, [0, 0]),
        ([1, 0], [0, 1], [0, 1]),
    ],
)
def test_correlation_examples(p, q, expected):
    assert np.allclose(correlations(CantorSpec.from_probs(p, q)), expected, atol=1e-12)


@given(specs())
def test_correlations_match_direct_sum(spec):
    g = correlations(spec)
    assert np.allclose(g, gamma_direct(spec.p, spec.second), atol=1e-12)
    assert (g >= -1e-15).all() and (g <= spec.M + 1e-12).all()


@given(st.integers(2, 7), prob)
def test_uniform_vector_gives_constant_correlations(M, c):
    g = correlations(CantorSpec.from_probs([c] * M))
    assert np.allclose(g, M * c * c, atol=1e-12)


# --- expectation matrices -----------------------------------------------


def family_a(rho):
    return CantorSpec.from_probs([1, 0, 1, rho])


def test_expectation_matrix_examples():
    rho = 0.3
    assert np.allclose(expectation_matrix(family_a(rho), 0), [[rho, 0], [rho, 2 + rho**2]], atol=1e-12)
    b = CantorSpec.from_probs([1, 0, rho, 0, 1])
    assert np.allclose(expectation_matrix(b, 1), [[0, 1], [2 * rho, 0]], atol=1e-12)
    assert np.allclose(expectation_matrix(CantorSpec.from_probs([1, 1]), 0), [[1, 0], [1, 2]])


def test_expectation_matrix_range_check():
    s = family_a(0.3)
    for k in (-1, 4):
        with pytest.raises(ValueError):
            expectation_matrix(s, k)


@settings(max_examples=60)
@given(specs(max_M=5))
def test_expectation_matrix_matches_triangle_geometry(spec):
    for k in range(spec.M):
        oracle = level1_matrix_by_geometry(spec.p, spec.second, k)
        assert np.allclose(expectation_matrix(spec, k), oracle, atol=1e-12)


@settings(max_examples=150)
@given(specs())
def test_column_sums_are_consecutive_correlations(spec):
    g = gamma_direct(spec.p, spec.second)
    M = spec.M
    for k in range(M):
        m = expectation_matrix(spec, k)
        assert (m >= 0).all()
        cs = m.sum(axis=0)
        assert abs(cs[0] - g[(k + 1) % M]) < 1e-12
        assert abs(cs[1] - g[k]) < 1e-12


@settings(max_examples=100)
@given(
    specs(max_M=5),
    st.lists(st.integers(0, 100), max_size=6),
    st.lists(st.integers(0, 100), max_size=6),
)
def test_word_matrix_is_multiplicative(spec, u, v):
    u = [x % spec.M for x in u]
    v = [x % spec.M for x in v]
    left = word_matrix(spec, u + v)
    right = word_matrix(spec, u) @ word_matrix(spec, v)
    assert np.allclose(left, right, rtol=1e-9, atol=1e-9)


@given(specs(max_M=4, two=False))
def test_mirror_symmetry_for_palindromic_vectors(spec):
    p = list(spec.p)
    pal = CantorSpec.from_probs(p[: (spec.M + 1) // 2] + p[: spec.M // 2][::-1])
    swap = np.array([[0, 1], [1, 0]])
    for k in range(pal.M):
        assert np.allclose(expectation_matrix(pal, pal.M - 1 - k), swap @ expectation_matrix(pal, k) @ swap, atol=1e-12)


def test_word_matrix_examples():
    rho = 0.3
    s = family_a(rho)
    expected = [[2 * rho + rho**3, rho**2], [2 * rho + rho**3, rho**2 + 2 * rho + rho**3]]
    assert np.allclose(word_matrix(s, (0, 3)), expected, atol=1e-12)
    assert np.array_equal(word_matrix(s, ()), np.eye(2))
    with pytest.raises(ValueError):
        word_matrix(s, (0, 4))


def test_word_matrix_equals_lifted_level1_matrix():
    s = family_a(0.5)
    lifted = higher_order(s, 2)
    assert np.allclose(word_matrix(s, (2, 1)), expectation_matrix(lifted, 9), atol=1e-12)


def test_word_matrix_matches_plain_product():
    s = CantorSpec.from_probs([0.2, 0.9, 0.4], [0.7, 0.1, 1.0])
    word = (2, 0, 1, 1, 2)
    ref = [[1.0, 0.0], [0.0, 1.0]]
    for k in word:
        ref = matmul2(ref, level1_matrix_by_geometry(s.p, s.second, k))
    assert np.allclose(word_matrix(s, word), ref, atol=1e-12)


# --- eigenvalues --------------------------------------------------------


def closed_form_lambda(rho):
    return (rho**2 + rho / 2 + 2 + 0.5 * math.sqrt(4 * rho**3 + rho**2 + 8 * rho)) * rho


def test_pf_eigenvalue_examples():
    lam = pf_eigenvalue(word_matrix(family_a(0.3), (0, 3)))
    assert lam == pytest.approx(closed_form_lambda(0.3), abs=1e-12)
    assert lam == pytest.approx(0.9138, abs=5e-5)
    assert pf_eigenvalue(np.eye(2)) == 1
    assert pf_eigenvalue([[2, 1], [0, 1]]) == 2


@pytest.mark.parametrize("rho", np.linspace(0.05, 0.95, 19))
def test_pf_eigenvalue_matches_closed_form_on_grid(rho):
    assert pf_eigenvalue(word_matrix(family_a(rho), (0, 3))) == pytest.approx(closed_form_lambda(rho), abs=1e-12)


def test_pf_eigenvalue_rejects_bad_input():
    with pytest.raises(ValueError):
        pf_eigenvalue([[1, -1], [0, 1]])
    with pytest.raises(ValueError):
        pf_eigenvalue(np.eye(3))


nonneg = st.floats(0, 50, allow_nan=False)


@given(st.lists(nonneg, min_size=4, max_size=4))
def test_pf_eigenvalue_properties(v):
    m = np.array(v).reshape(2, 2)
    lam = pf_eigenvalue(m)
    assert lam >= max(m[0, 0], m[1, 1]) - 1e-12
    assert lam == pytest.approx(max(np.linalg.eigvals(m).real), rel=1e-9, abs=1e-9)


@given(st.lists(st.floats(0, 1, allow_nan=False), min_size=8, max_size=8))
def test_product_of_substochastic_columns_has_eigenvalue_below_one(v):
    a = np.array(v[:4]).reshape(2, 2)
    b = np.array(v[4:]).reshape(2, 2)
    # scale so every column sum is strictly below 1
    a = a / (a.sum(axis=0, keepdims=True) + 1.01)
    b = b / (b.sum(axis=0, keepdims=True) + 1.01)
    assert pf_eigenvalue(a @ b) < 1


# --- higher order lift --------------------------------------------------


def test_higher_order_examples():
    rho = 0.2
    s = family_a(rho)
    lifted = higher_order(s, 2)
    assert lifted.M == 16
    assert lifted.p[3] == pytest.approx(rho)
    assert higher_order(s, 1) == s
    assert correlations(lifted)[4] == pytest.approx(4 * rho + 2 * rho**3, abs=1e-12)
    assert correlations(lifted)[4] == pytest.approx(0.816, abs=1e-12)


def test_higher_order_cap_and_order_checks():
    s = CantorSpec.from_probs([0.5] * 10)
    with pytest.raises(ValueError):
        higher_order(s, 7)
    with pytest.raises(ValueError):
        higher_order(s, 0)
    assert higher_order(s, 2, cap=100).M == 100


def test_higher_order_two_vector_lifts_both():
    s = CantorSpec.from_probs([0.2, 0.9], [1.0, 0.5])
    h = higher_order(s, 3)
    assert np.allclose(h.p, lifted_vector(s.p, 3))
    assert np.allclose(h.q, lifted_vector(s.q, 3))


def test_gamma_at_examples():
    rho = 0.2
    s = family_a(rho)
    g = correlations(s)
    assert [gamma_at(s, 1, k) for k in range(4)] == pytest.approx(list(g), abs=1e-12)
    assert gamma_at(s, 2, 3) == pytest.approx(2 * rho + 2 * rho**2 + rho**3, abs=1e-12)
    assert gamma_at(s, 2, 3) == pytest.approx(0.488, abs=1e-12)
    b = CantorSpec.from_probs([1, 0, 0.5, 0, 1])
    assert digits(1, 5, 3) == (0, 0, 1)
    assert gamma_at(b, 3, 1) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        gamma_at(s, 2, 16)


@settings(max_examples=25, deadline=None)
@given(specs(max_M=4), st.integers(1, 3))
def test_lift_consistency(spec, n):
    # oracle: correlations of the explicitly lifted vectors
    p = lifted_vector(spec.p, n)
    q = lifted_vector(spec.second, n)
    ref = gamma_direct(p, q)
    got = [gamma_at(spec, n, k) for k in range(spec.M**n)]
    assert np.allclose(got, ref, atol=1e-9)
    assert np.allclose(correlations(higher_order(spec, n)), ref, atol=1e-9)


@settings(max_examples=30, deadline=None)
@given(specs(max_M=4), st.integers(1, 4))
def test_word_products_and_column_sums_follow_integer_order(spec, length):
    mats = level1_matrices(spec)
    prods = word_products(mats, length)
    for k in range(0, spec.M**length, max(1, spec.M**length // 7)):
        assert np.allclose(prods[k], word_matrix(spec, digits(k, spec.M, length)), atol=1e-12)
    # a tiny block forces the prefix/suffix splitting path
    chunks = list(iter_column_sums(mats, length, block=spec.M))
    starts = [s for s, _ in chunks]
    sums = np.concatenate([c for _, c in chunks])
    assert starts == sorted(starts) and starts[0] == 0
    assert np.allclose(sums, prods.sum(axis=1), atol=1e-12)


# --- triangle geometry --------------------------------------------------


def test_column_of_examples():
    assert column_of(TriangleAddress(1, "R", 3, 1), 4) == ColumnId(1, "+", 2, 4)
    assert column_of(TriangleAddress(1, "L", 1, 3), 4) == ColumnId(1, "-", 1, 4)
    for M in (2, 3, 5):
        for i in range(M):
            assert column_of(TriangleAddress(1, "R", i, i), M) == ColumnId(1, "+", 0, M)
    c = column_of(TriangleAddress(2, "L", 4, 4), 3)
    assert (c.side, c.index, c.digits) == ("-", 8, (2, 2))
    assert signed_offset(c) == -1


def test_column_of_rejects_bad_addresses():
    with pytest.raises(ValueError):
        column_of(TriangleAddress(1, "R", 4, 0), 4)
    with pytest.raises(ValueError):
        column_of(TriangleAddress(1, "X", 0, 0), 4)


@pytest.mark.parametrize("M, n", [(M, n) for M in (2, 3, 4) for n in (1, 2, 3)])
def test_column_of_agrees_with_exact_geometry(M, n):
    N = M**n
    seen = set()
    for kind in "LR":
        for i, j in itertools.product(range(N), repeat=2):
            col = column_of(TriangleAddress(n, kind, i, j), M)
            assert 0 <= col.index < N
            s = signed_offset(col)
            assert s == geometric_column(M, n, kind, i, j)
            seen.add(s)
    # every one of the 2 * M**n columns receives at least one triangle
    assert seen == set(range(-N, N))


def test_dimension():
    d1, d2 = dimension(CantorSpec.from_probs([0.8] * 3))
    assert d1 == pytest.approx(math.log(2.4) / math.log(3))
    assert d1 == d2
    assert math.isnan(dimension(CantorSpec.from_probs([0.4, 0.4]))[0])
