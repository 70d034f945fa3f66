"""Exact integer linear algebra on small dense matrices.

Matrices are plain lists of row lists of Python ints.  All routines are
gcd-based elimination with arbitrary precision; sizes are desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InvariantBreach, NotSaturated, RankDeficient, ValidationError


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def zeros(rows: int, cols: int) -> list[list[int]]:
    return [[0] * cols for _ in range(rows)]


def transpose(a):
    if not a:
        return []
    return [list(col) for col in zip(*a)]


def matmul(a, b):
    if not a:
        return []
    bt = transpose(b)
    if not bt:
        return [[] for _ in a]
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def matvec(a, v):
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def as_matrix(a) -> list[list[int]]:
    rows = [[int(x) for x in row] for row in a]
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise ValidationError("ragged matrix", a)
    return rows


def columns(a, ncols=None):
    """Column vectors of ``a`` (``ncols`` disambiguates a matrix with no rows)."""
    if not a:
        return [[] for _ in range(ncols or 0)]
    return transpose(a)


def from_columns(cols, nrows: int):
    if not cols:
        return [[] for _ in range(nrows)]
    return transpose(cols)


def hnf(a):
    """Row Hermite normal form.

    Returns ``(h, u)`` with ``u`` unimodular and ``u a = h``; ``h`` is upper
    echelon with positive pivots and entries above each pivot reduced into
    ``[0, pivot)``.
    """
    a = as_matrix(a)
    m = len(a)
    n = len(a[0]) if a else 0
    rows = [a[i] + identity(m)[i] for i in range(m)]
    piv = 0
    for col in range(n):
        if piv == m:
            break
        while True:
            live = [i for i in range(piv, m) if rows[i][col]]
            if not live:
                break
            best = min(live, key=lambda i: abs(rows[i][col]))
            rows[piv], rows[best] = rows[best], rows[piv]
            p = rows[piv][col]
            done = True
            for i in range(piv + 1, m):
                if rows[i][col]:
                    q = rows[i][col] // p
                    rows[i] = [x - q * y for x, y in zip(rows[i], rows[piv])]
                    if rows[i][col]:
                        done = False
            if done:
                break
        if not rows[piv][col]:
            continue
        if rows[piv][col] < 0:
            rows[piv] = [-x for x in rows[piv]]
        p = rows[piv][col]
        for i in range(piv):
            q = rows[i][col] // p
            if q:
                rows[i] = [x - q * y for x, y in zip(rows[i], rows[piv])]
        piv += 1
    h = [r[:n] for r in rows]
    u = [r[n:] for r in rows]
    return h, u


def snf(a):
    """Smith normal form ``(d, u, v)`` with ``u a v = d``.

    ``u`` and ``v`` are unimodular, ``d`` is diagonal with nonnegative
    entries and ``d[i][i]`` divides ``d[i+1][i+1]``.  Alternating row and
    column Hermite forms keeps the entries reduced while diagonalizing.
    """
    d = as_matrix(a)
    m = len(d)
    n = len(d[0]) if d else 0
    u, v = identity(m), identity(n)
    if not m or not n:
        return d, u, v
    while not _is_diagonal(d):
        d, uu = hnf(d)
        u = matmul(uu, u)
        if _is_diagonal(d):
            break
        ht, vv = hnf(transpose(d))
        d = transpose(ht)
        v = matmul(v, transpose(vv))
    k = min(m, n)
    # divisibility chain: diag(a, b) -> diag(gcd, lcm) by unimodular moves
    changed = True
    while changed:
        changed = False
        for i in range(k):
            for j in range(i + 1, k):
                x, y = d[i][i], d[j][j]
                if x == 0 and y == 0 or (x != 0 and y % x == 0):
                    continue
                g, s_, t_ = _xgcd(x, y)
                # rows: r_i += r_j; cols: (c_i, c_j) <- (s c_i + t c_j, -y/g c_i + x/g c_j)
                u[i] = [p + q for p, q in zip(u[i], u[j])]
                for row in v:
                    ci, cj = row[i], row[j]
                    row[i], row[j] = s_ * ci + t_ * cj, -(y // g) * ci + (x // g) * cj
                # then r_j -= (t y / g) r_i, leaving diag(g, x y / g)
                q = t_ * y // g
                u[j] = [p - q * r for p, r in zip(u[j], u[i])]
                d[i][i], d[j][j] = g, x * y // g
                changed = True
    for i in range(k):
        if d[i][i] < 0:
            d[i][i] = -d[i][i]
            u[i] = [-x for x in u[i]]
    return d, u, v


def _is_diagonal(d):
    return all(not x for i, row in enumerate(d) for j, x in enumerate(row) if i != j)


def _xgcd(a, b):
    """(g, s, t) with s a + t b = g = gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def snf_diagonal(a) -> list[int]:
    d, _, _ = snf(a)
    return [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0))]


def det(a) -> int:
    """Exact determinant via fraction-free (Bareiss) elimination."""
    a = as_matrix(a)
    n = len(a)
    if any(len(r) != n for r in a):
        raise ValidationError("determinant of a non-square matrix", a)
    if n == 0:
        return 1
    m = [list(r) for r in a]
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k]), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def rational_inverse(a):
    """Exact inverse as a matrix of Fractions, or None when singular."""
    n = len(a)
    rows = [[Fraction(x) for x in a[i]] + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next((i for i in range(col, n) if rows[i][col]), None)
        if piv is None:
            return None
        rows[col], rows[piv] = rows[piv], rows[col]
        p = rows[col][col]
        rows[col] = [x / p for x in rows[col]]
        for i in range(n):
            if i != col and rows[i][col]:
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[col])]
    return [r[n:] for r in rows]


def det_and_inverse(a):
    """``(det, inverse)``; the inverse is None exactly when det == 0."""
    a = as_matrix(a)
    d = det(a)
    if d == 0:
        return 0, None
    return d, rational_inverse(a)


def integer_inverse(a):
    """Inverse of a unimodular matrix, as integers."""
    inv = rational_inverse(a)
    if inv is None or any(x.denominator != 1 for row in inv for x in row):
        raise ValidationError("matrix is not unimodular", a)
    return [[int(x) for x in row] for row in inv]


def rank(a) -> int:
    """Rank over Q."""
    rows = [[Fraction(x) for x in r] for r in a]
    if not rows:
        return 0
    n = len(rows[0])
    rk = 0
    for col in range(n):
        piv = next((i for i in range(rk, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[rk], rows[piv] = rows[piv], rows[rk]
        for i in range(rk + 1, len(rows)):
            if rows[i][col]:
                f = rows[i][col] / rows[rk][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[rk])]
        rk += 1
    return rk


def is_unimodular(a) -> bool:
    return bool(a) and len(a) == len(a[0]) and abs(det(a)) == 1


def complete_columns(first_cols, m: int | None = None):
    """Extend an m x r integer matrix of independent columns to m x m, det != 0.

    Appended columns are standard basis vectors, tried in increasing index
    order and kept whenever they raise the rank.
    """
    first_cols = as_matrix(first_cols)
    if m is None:
        m = len(first_cols)
    r = len(first_cols[0]) if first_cols and first_cols[0] else 0
    cols = columns(first_cols, r)
    if rank(from_columns(cols, m)) < r:
        raise RankDeficient("given columns are linearly dependent", first_cols)
    for i in range(m):
        if len(cols) == m:
            break
        e = [int(k == i) for k in range(m)]
        if rank(from_columns(cols + [e], m)) == len(cols) + 1:
            cols.append(e)
    return from_columns(cols, m)


@dataclass(frozen=True)
class BasisSplit:
    """A unimodular basis of Z^m whose last m - r vectors span a sublattice."""

    full_basis: tuple  # m column vectors
    r: int

    @property
    def m(self) -> int:
        return len(self.full_basis)

    def matrix(self):
        """Basis vectors as the columns of an m x m matrix."""
        return from_columns([list(v) for v in self.full_basis], self.m)


def _saturated_rank(cols, m):
    """Rank of the lattice spanned by ``cols`` if saturated, else None."""
    if not cols:
        return 0
    diag = snf_diagonal(from_columns(cols, m))
    nz = [x for x in diag if x]
    if any(x != 1 for x in nz):
        return None
    return len(nz)


def split_basis(sublattice_gens, m: int | None = None) -> BasisSplit:
    """Unimodular basis of Z^m ending with a basis of the given sublattice.

    ``sublattice_gens`` is an m x s matrix whose columns generate a
    saturated sublattice (an m x 0 matrix, i.e. m empty rows, is allowed).
    """
    gens = as_matrix(sublattice_gens)
    if m is None:
        m = len(gens)
    s = len(gens[0]) if gens and gens[0] else 0
    gen_cols = [c for c in columns(gens, s) if any(c)]
    if gen_cols:
        diag = snf_diagonal(from_columns(gen_cols, m))
        if any(x not in (0, 1) for x in diag):
            raise NotSaturated("sublattice is not saturated", diag)
        h, _ = hnf(gen_cols)  # rows are generators
        sub = [row for row in h if any(row)]
    else:
        sub = []
    k = len(sub)
    comp = []
    for i in range(m):
        if len(comp) == m - k:
            break
        e = [int(j == i) for j in range(m)]
        if _saturated_rank(comp + [e] + sub, m) == len(comp) + 1 + k:
            comp.append(e)
    if len(comp) != m - k:
        # greedy failed (e.g. span (2, 3) in Z^2): complement from the SNF
        _, u, _ = snf(from_columns(sub, m))
        uinv = integer_inverse(u)
        comp = columns(uinv)[k:]
    basis = tuple(tuple(v) for v in comp + sub)
    if abs(det(from_columns([list(v) for v in basis], m))) != 1:
        raise InvariantBreach("split_basis produced a non-unimodular basis", basis)
    return BasisSplit(basis, m - k)


def saturation_basis(gen_cols, m: int):
    """Basis (column vectors) of (Q-span of the columns) intersected with Z^m."""
    gen_cols = [list(c) for c in gen_cols if any(c)]
    if not gen_cols:
        return []
    d, u, _ = snf(from_columns(gen_cols, m))
    k = sum(1 for i in range(min(len(d), len(d[0]))) if d[i][i])
    sat = columns(integer_inverse(u))[:k]
    h, _ = hnf(sat)
    return [row for row in h if any(row)]


def in_row_lattice(gen_rows, v) -> bool:
    """Whether v is an integer combination of the given row vectors."""
    h, _ = hnf([list(g) for g in gen_rows]) if gen_rows else ([], [])
    v = list(v)
    for row in h:
        piv = next((j for j, x in enumerate(row) if x), None)
        if piv is None:
            break
        if v[piv] % row[piv]:
            return False
        q = v[piv] // row[piv]
        v = [a - q * b for a, b in zip(v, row)]
    return not any(v)


def solve_integer(basis_matrix, v):
    """Coordinates of v in a unimodular basis (columns of ``basis_matrix``)."""
    inv = integer_inverse(basis_matrix)
    return matvec(inv, v)
