from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toroidal import intlat
from toroidal.errors import NotSaturated, RankDeficient

from strategies import int_matrices, square_matrices


def is_row_hnf(h):
    """Upper echelon, positive pivots, entries above each pivot reduced."""
    last = -1
    seen_zero = False
    for i, row in enumerate(h):
        nz = [j for j, x in enumerate(row) if x]
        if not nz:
            seen_zero = True
            continue
        if seen_zero:
            return False
        p = nz[0]
        if p <= last or row[p] <= 0:
            return False
        for k in range(i):
            if not 0 <= h[k][p] < row[p]:
                return False
        last = p
    return True


def test_hnf_examples():
    assert intlat.hnf([[1, 0], [0, 1]]) == ([[1, 0], [0, 1]], [[1, 0], [0, 1]])
    h, u = intlat.hnf([[2, 1], [0, 1]])
    assert h == [[2, 0], [0, 1]]
    assert intlat.matmul(u, [[2, 1], [0, 1]]) == h
    h, u = intlat.hnf([[0, 0], [0, 0]])
    assert h == [[0, 0], [0, 0]] and u == [[1, 0], [0, 1]]


def test_snf_examples():
    assert intlat.snf_diagonal([[2, 0], [0, 3]]) == [1, 6]
    assert intlat.snf_diagonal([[2, 4], [6, 8]]) == [2, 4]
    d, u, v = intlat.snf([[0, 0], [0, 0]])
    assert d == [[0, 0], [0, 0]]


def test_det_and_inverse_examples():
    d, inv = intlat.det_and_inverse([[1, 1], [1, 2]])
    assert d == 1 and inv == [[2, -1], [-1, 1]]
    assert intlat.det_and_inverse([[1, 0], [0, 1]]) == (1, [[1, 0], [0, 1]])
    assert intlat.det_and_inverse([[1, 2], [2, 4]]) == (0, None)


def test_complete_columns_examples():
    assert intlat.complete_columns([[1], [1]]) == [[1, 1], [1, 0]]
    assert intlat.complete_columns([[], []], 2) == [[1, 0], [0, 1]]
    assert intlat.complete_columns([[4]]) == [[4]]
    with pytest.raises(RankDeficient):
        intlat.complete_columns([[1, 2], [2, 4]])


def test_split_basis_examples():
    b = intlat.split_basis([[1], [1]])
    assert b.full_basis == ((1, 0), (1, 1)) and b.r == 1
    b = intlat.split_basis([[1, 0], [0, 1]])
    assert b.r == 0 and b.full_basis == ((1, 0), (0, 1))
    with pytest.raises(NotSaturated) as exc:
        intlat.split_basis([[2], [0]])
    assert 2 in exc.value.witness


def test_split_basis_greedy_fallback():
    # span of (2, 3): no standard vector alone completes it
    b = intlat.split_basis([[2], [3]])
    assert abs(intlat.det(b.matrix())) == 1
    assert b.full_basis[-1] in ((2, 3), (-2, -3))


@settings(max_examples=500, deadline=None)
@given(int_matrices())
def test_hnf_certificate(a):
    h, u = intlat.hnf(a)
    assert intlat.matmul(u, a) == h
    assert intlat.is_unimodular(u)
    assert is_row_hnf(h)


@settings(max_examples=500, deadline=None)
@given(int_matrices())
def test_snf_certificate(a):
    d, u, v = intlat.snf(a)
    assert intlat.matmul(intlat.matmul(u, a), v) == d
    assert intlat.is_unimodular(u) and intlat.is_unimodular(v)
    diag = [d[i][i] for i in range(min(len(d), len(d[0])))]
    assert all(d[i][j] == 0 for i in range(len(d)) for j in range(len(d[0])) if i != j)
    assert all(x >= 0 for x in diag)
    for x, y in zip(diag, diag[1:]):
        assert (y == 0) if x == 0 else (y % x == 0)


@settings(max_examples=500, deadline=None)
@given(square_matrices())
def test_det_inverse_identity(a):
    d, inv = intlat.det_and_inverse(a)
    n = len(a)
    if d == 0:
        assert inv is None
        assert intlat.rank(a) < n
        return
    prod = [[sum(Fraction(a[i][k]) * inv[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    assert prod == intlat.identity(n)
    diag = intlat.snf_diagonal(a)
    p = 1
    for x in diag:
        p *= x
    assert abs(d) == p


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 6).flatmap(lambda m: st.integers(0, m).flatmap(
    lambda r: st.lists(st.lists(st.integers(-6, 6), min_size=r, max_size=r), min_size=m, max_size=m))))
def test_complete_columns(first):
    m = len(first)
    r = len(first[0])
    if r and intlat.rank(first) < r:
        with pytest.raises(RankDeficient):
            intlat.complete_columns(first, m)
        return
    full = intlat.complete_columns(first, m)
    assert intlat.det(full) != 0
    assert [row[:r] for row in full] == first
    # appended columns are standard basis vectors
    for j in range(r, m):
        col = [row[j] for row in full]
        assert sorted(col) == [0] * (m - 1) + [1]


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 5).flatmap(lambda m: st.lists(
    st.lists(st.integers(-5, 5), min_size=m, max_size=m), min_size=0, max_size=m)))
def test_split_basis(gens):
    m = len(gens[0]) if gens else 1
    sat = intlat.saturation_basis(gens, m)
    b = intlat.split_basis(intlat.from_columns(sat, m), m)
    assert abs(intlat.det(b.matrix())) == 1
    tail = [list(v) for v in b.full_basis[b.r:]]
    # the tail generates exactly the saturated span of the generators
    assert len(tail) == (intlat.rank(gens) if gens else 0)
    for g in gens:
        assert intlat.in_row_lattice(tail, g) if tail else not any(g)
    for v in tail:
        assert intlat.in_row_lattice(sat, v)
    for w in sat:
        assert intlat.in_row_lattice(tail, w)


@settings(max_examples=200, deadline=None)
@given(square_matrices(max_n=4, lo=-5, hi=5))
def test_non_saturated_spans_are_rejected(a):
    cols = [c for c in intlat.columns(a) if any(c)]
    if not cols:
        return
    diag = intlat.snf_diagonal(intlat.from_columns(cols, len(a)))
    if all(x in (0, 1) for x in diag):
        intlat.split_basis(intlat.from_columns(cols, len(a)), len(a))
    else:
        with pytest.raises(NotSaturated):
            intlat.split_basis(intlat.from_columns(cols, len(a)), len(a))
