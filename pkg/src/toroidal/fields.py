"""Exact scalars over Q and simple number fields Q(theta).

Elements are stored as tuples of ``gmpy2.mpq`` coefficients in the power
basis 1, theta, ..., theta^(d-1).  :class:`FieldSpec` owns the arithmetic on
those raw tuples (the series code works on raw tuples directly for speed);
:class:`Scalar` is the user-facing value type with operator overloading.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import gmpy2
from gmpy2 import mpq

from .errors import DivisionByZero, FieldMismatch, ValidationError

_QUADRATIC_HEIGHT = 5


def to_mpq(x) -> mpq:
    if isinstance(x, str):
        return mpq(x.strip())
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


class FieldSpec:
    """Q, or Q[t]/(min_poly) for a monic irreducible integer polynomial.

    ``min_poly`` lists coefficients from the constant term upwards, so
    ``(1, 0, 1)`` is t^2 + 1.
    """

    def __init__(self, min_poly=None, label="t", trusted=False):
        if min_poly is None:
            self.kind = "rationals"
            self.min_poly = None
            self.degree = 1
        else:
            poly = tuple(int(c) for c in min_poly)
            if len(poly) < 3:
                raise ValidationError("min_poly must have degree >= 2", poly)
            if poly[-1] != 1:
                raise ValidationError("min_poly must be monic", poly)
            self.kind = "number_field"
            self.min_poly = poly
            self.degree = len(poly) - 1
            _check_irreducible(poly, trusted)
        self.label = label
        self.trusted = bool(trusted)
        d = self.degree
        self.zero = (mpq(0),) * d
        self.one = (mpq(1),) + (mpq(0),) * (d - 1)

    @classmethod
    def rationals(cls) -> FieldSpec:
        return cls()

    @classmethod
    def number_field(cls, min_poly, label="t", trusted=False) -> FieldSpec:
        return cls(min_poly, label, trusted)

    @property
    def is_rationals(self) -> bool:
        return self.min_poly is None

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and self.min_poly == other.min_poly

    def __hash__(self):
        return hash(("FieldSpec", self.min_poly))

    def __repr__(self):
        if self.is_rationals:
            return "FieldSpec(QQ)"
        return f"FieldSpec({self.min_poly}, label={self.label!r})"

    def contains_field(self, other: FieldSpec) -> bool:
        """Whether ``other`` embeds canonically (Q, or the field itself)."""
        return other.is_rationals or other == self

    # -- raw element arithmetic --------------------------------------------

    @cached_property
    def _reductions(self):
        # theta^k for k = d .. 2d-2, in the power basis
        d = self.degree
        low = [-mpq(c) for c in self.min_poly[:-1]]
        out = []
        cur = list(low)
        for _ in range(d - 1):
            out.append(tuple(cur))
            top = cur[-1]
            cur = [mpq(0)] + cur[:-1]
            cur = [cur[i] + top * low[i] for i in range(d)]
        return out

    def raw(self, x) -> tuple:
        if isinstance(x, Scalar):
            if x.field != self:
                if x.field.is_rationals:
                    return (x.c[0],) + self.zero[1:]
                raise FieldMismatch("scalar lives in a different field", x)
            return x.c
        if isinstance(x, (tuple, list)):
            if len(x) != self.degree:
                raise ValidationError("wrong number of coefficients", x)
            return tuple(to_mpq(c) for c in x)
        return (to_mpq(x),) + self.zero[1:]

    def add(self, a, b):
        if self.degree == 1:
            return (a[0] + b[0],)
        return tuple(x + y for x, y in zip(a, b))

    def sub(self, a, b):
        if self.degree == 1:
            return (a[0] - b[0],)
        return tuple(x - y for x, y in zip(a, b))

    def neg(self, a):
        return tuple(-x for x in a)

    def scale(self, a, q):
        return tuple(x * q for x in a)

    def is_zero(self, a) -> bool:
        return not any(a)

    def mul(self, a, b):
        if self.degree == 1:
            return (a[0] * b[0],)
        d = self.degree
        prod = [mpq(0)] * (2 * d - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        out = prod[:d]
        for k, red in enumerate(self._reductions):
            c = prod[d + k]
            if c:
                out = [o + c * r for o, r in zip(out, red)]
        return tuple(out)

    def inv(self, a):
        if not any(a):
            raise DivisionByZero("inverse of zero")
        if self.degree == 1:
            return (1 / a[0],)
        # solve (multiplication-by-a matrix) x = 1
        d = self.degree
        basis = [tuple(mpq(int(i == k)) for i in range(d)) for k in range(d)]
        cols = [self.mul(a, e) for e in basis]
        rows = [[cols[j][i] for j in range(d)] + [self.one[i]] for i in range(d)]
        return tuple(_solve_augmented(rows))

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, n: int):
        if n < 0:
            a, n = self.inv(a), -n
        result = self.one
        while n:
            if n & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            n >>= 1
        return result

    # -- user-facing constructors ------------------------------------------

    def __call__(self, x) -> Scalar:
        return Scalar(self, self.raw(x))

    def gen(self) -> Scalar:
        if self.is_rationals:
            raise ValidationError("Q has no generator")
        return Scalar(self, (mpq(0), mpq(1)) + self.zero[2:])


def _solve_augmented(rows):
    """Gauss-Jordan on a square augmented system; returns the solution."""
    n = len(rows)
    rows = [list(r) for r in rows]
    for col in range(n):
        piv = next(i for i in range(col, n) if rows[i][col])
        rows[col], rows[piv] = rows[piv], rows[col]
        p = rows[col][col]
        rows[col] = [x / p for x in rows[col]]
        for i in range(n):
            if i != col and rows[i][col]:
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[col])]
    return [r[-1] for r in rows]


class Scalar:
    """An exact element of a :class:`FieldSpec`; immutable and hashable."""

    __slots__ = ("field", "c")

    def __init__(self, field: FieldSpec, coeffs):
        self.field = field
        self.c = tuple(coeffs)

    def _other(self, other):
        if isinstance(other, Scalar):
            if other.field == self.field:
                return other.c
            if other.field.is_rationals:
                return (other.c[0],) + self.field.zero[1:]
            if self.field.is_rationals:
                return NotImplemented
            raise FieldMismatch("operands live in different fields", (self, other))
        if isinstance(other, (int, Fraction)) or type(other).__name__ == "mpq":
            return (to_mpq(other),) + self.field.zero[1:]
        return NotImplemented

    def _promote(self, other):
        # Q-scalar meeting a number-field scalar: lift self first
        if isinstance(other, Scalar) and self.field.is_rationals and not other.field.is_rationals:
            return other.field(self)
        return None

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            lifted = self._promote(other)
            return NotImplemented if lifted is None else lifted + other
        return Scalar(self.field, self.field.add(self.c, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            lifted = self._promote(other)
            return NotImplemented if lifted is None else lifted - other
        return Scalar(self.field, self.field.sub(self.c, o))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Scalar(self.field, self.field.neg(self.c))

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            lifted = self._promote(other)
            return NotImplemented if lifted is None else lifted * other
        return Scalar(self.field, self.field.mul(self.c, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            lifted = self._promote(other)
            return NotImplemented if lifted is None else lifted / other
        return Scalar(self.field, self.field.div(self.c, o))

    def __rtruediv__(self, other):
        return self.inverse() * other

    def inverse(self) -> Scalar:
        return Scalar(self.field, self.field.inv(self.c))

    def __pow__(self, n: int):
        return Scalar(self.field, self.field.pow(self.c, int(n)))

    def __eq__(self, other):
        if isinstance(other, Scalar):
            if other.field != self.field:
                if self.field.is_rationals or other.field.is_rationals:
                    return self.c[0] == other.c[0] and not any(self.c[1:]) and not any(other.c[1:])
                return False
            return self.c == other.c
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        return self.c == o

    def __hash__(self):
        if not any(self.c[1:]):
            return hash(self.c[0])
        return hash(self.c)

    def __bool__(self):
        return any(self.c)

    def is_zero(self) -> bool:
        return not any(self.c)

    def __repr__(self):
        return f"Scalar({self})"

    def __str__(self):
        if self.field.is_rationals or not any(self.c[1:]):
            return str(self.c[0])
        parts = []
        for k, q in enumerate(self.c):
            if not q:
                continue
            mono = "" if k == 0 else (self.field.label if k == 1 else f"{self.field.label}^{k}")
            if not mono:
                parts.append(str(q))
            elif q == 1:
                parts.append(mono)
            elif q == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{q}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def arithmetic(a: Scalar, b: Scalar, op: str) -> Scalar:
    if a.field != b.field:
        raise FieldMismatch("operands live in different fields", (a, b))
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


def rational_value(a: Scalar):
    """Return the rational value of ``a``, or None if it is not in Q."""
    if any(a.c[1:]):
        return None
    return a.c[0]


# -- polynomials over Q ------------------------------------------------------


def _divisors(n: int) -> list[int]:
    n = abs(int(n))
    small, large = [], []
    for d in range(1, math.isqrt(n) + 1):
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
    return small + large[::-1]


def poly_eval(coeffs, x):
    acc = mpq(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def rational_roots(coeffs) -> list:
    """All rational roots of a polynomial (coefficients low to high), sorted.

    Found from the factorization over Q, so large coefficients are cheap
    (plain divisor enumeration of the rational root test is not).
    """
    from sympy import QQ, Poly, Rational, Symbol

    cs = [to_mpq(c) for c in coeffs]
    while cs and not cs[-1]:
        cs.pop()
    if not cs:
        raise ValueError("the zero polynomial has every rational as a root")
    if len(cs) == 1:
        return []
    t = Symbol("t")
    poly = Poly([Rational(int(c.numerator), int(c.denominator)) for c in reversed(cs)], t, domain=QQ)
    roots = [mpq(int(r.p), int(r.q)) for r in poly.ground_roots()]
    return sorted(roots)


def _poly_divmod_int(num, den):
    """Exact division test of integer polynomials (low to high); den monic."""
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1]
        out[i] = c
        for j, d in enumerate(den):
            num[i + j] -= c * d
    return out, num[: len(den) - 1]


def _check_irreducible(poly, trusted):
    deg = len(poly) - 1
    if rational_roots(poly):
        raise ValidationError("min_poly has a rational root", poly)
    if deg <= 3:
        return
    if not trusted:
        raise ValidationError(
            "irreducibility of min_poly of degree >= 4 must be declared trusted", poly
        )
    # monic integer factors only (Gauss); bounded-height quadratic search
    rng = range(-_QUADRATIC_HEIGHT, _QUADRATIC_HEIGHT + 1)
    for b, c in itertools.product(rng, rng):
        _, rem = _poly_divmod_int(poly, (c, b, 1))
        if not any(rem):
            raise ValidationError(f"min_poly divisible by t^2 + {b}t + {c}", poly)


# -- n-th roots -----------------------------------------------------------------


@dataclass(frozen=True)
class NoRoot:
    """Outcome of :func:`nth_root` when no root was found.

    ``certified`` is True when the search is complete (Q and quadratic
    fields); False means only a bounded search was exhausted.
    """

    value: Scalar
    n: int
    certified: bool
    reason: str = ""

    def __bool__(self):
        return False


def rational_nth_roots(q, n: int) -> list:
    """All rational x with x^n = q, in decreasing order."""
    q = to_mpq(q)
    if q == 0:
        return [mpq(0)]
    if q < 0 and n % 2 == 0:
        return []
    num, exact_n = gmpy2.iroot(abs(q.numerator), n)
    den, exact_d = gmpy2.iroot(q.denominator, n)
    if not (exact_n and exact_d):
        return []
    r = mpq(num, den)
    if q < 0:
        return [-r]
    return [r, -r] if n % 2 == 0 else [r]


def nth_root(a: Scalar, n: int):
    """An n-th root of ``a`` in its field, or a :class:`NoRoot` outcome."""
    if n < 1:
        raise ValueError("n must be positive")
    if a.is_zero():
        raise ValidationError("nth_root of zero is excluded", a)
    field = a.field
    q = rational_value(a)
    if q is not None:
        roots = rational_nth_roots(q, n)
        if roots:
            return field(roots[0])
        if field.is_rationals:
            return NoRoot(a, n, True, "no rational root")
    if field.degree == 2:
        return _quadratic_nth_root(a, n)
    return _bounded_nth_root(a, n)


def quadratic_power_components(field: FieldSpec, n: int):
    """(A, B) with (t + theta)^n = A(t) + B(t) theta, as coefficient lists."""
    c0, c1, _ = field.min_poly
    A, B = [mpq(1)], [mpq(0)]
    for _ in range(n):
        # (A + B th)(t + th) = A t + (A + B t) th + B th^2,  th^2 = -c1 th - c0
        tA = [mpq(0)] + A
        tB = [mpq(0)] + B
        newA = _padd(tA, [-c0 * b for b in B])
        newB = _padd(_padd(A, tB), [-c1 * b for b in B])
        A, B = newA, newB
    return A, B


def _padd(p, q):
    n = max(len(p), len(q))
    return [(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)]


def _quadratic_nth_root(a: Scalar, n: int):
    # r = q (t + theta) with t, q rational, unless r is rational
    field = a.field
    a0, a1 = a.c
    A, B = quadratic_power_components(field, n)
    cands = []
    if a1 == 0:
        cands.extend(field(x) for x in rational_nth_roots(a0, n))
    eq = _padd([a1 * x for x in A], [-a0 * x for x in B])
    for t in rational_roots(eq):
        At, Bt = poly_eval(A, t), poly_eval(B, t)
        ratio = a0 / At if At else a1 / Bt
        for q in rational_nth_roots(ratio, n):
            cands.append(Scalar(field, (q * t, q)))
    roots = [r for r in cands if r ** n == a]
    if not roots:
        return NoRoot(a, n, True, "rational root test on the norm-free equation")
    return max(roots, key=lambda r: tuple(reversed(r.c)))


def _bounded_nth_root(a: Scalar, n: int, height=3, dens=(1, 2)):
    field = a.field
    rng = range(-height, height + 1)
    for den in dens:
        for coeffs in itertools.product(rng, repeat=field.degree):
            if not any(coeffs):
                continue
            r = Scalar(field, tuple(mpq(c, den) for c in coeffs))
            if r ** n == a:
                return r
    return NoRoot(a, n, False, "bounded search exhausted")
