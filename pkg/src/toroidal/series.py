"""Truncated power series in the completed local ring at a toric point.

At a point x with face lattice L, pick the split basis z_1..z_m of
:attr:`ToricPoint.split`: z_1..z_r complete L, z_{r+1}..z_m span it.  The
completed local ring is then

    k(x)[[sharp monoid]] [[s_{r+1}, ..., s_m]],   z_i = z_i(x) (1 + s_i),

where the sharp monoid is the image of S in the first r z-coordinates.  A
monomial key is a tuple of length m: the sharp exponent followed by the
s-multidegree.  Truncation is by the weight h(sharp part) + |s-degree|.

Every :class:`Series` records ``prec``, the weight through which its stored
coefficients are known to be correct (``math.inf`` for an exact
polynomial).  Inputs cut off at the model order have ``prec == order``;
dividing out a monomial lowers it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

from gmpy2 import mpq

from .errors import BadConstantTerm, ModelMismatch, NotAUnit, NotMonomialTimesUnit, ValidationError
from .fields import FieldSpec, Scalar
from .toric import AffineMonoid, ToricPoint

INF = math.inf


class LocalModel:
    """The truncated completed local ring of Spec k[S] at ``point``."""

    def __init__(self, point: ToricPoint, order: int, grading=None):
        if order < 0:
            raise ValidationError("truncation order must be nonnegative", order)
        self.point = point
        self.field: FieldSpec = point.field
        self.order = int(order)
        self.m = point.monoid.rank
        self.r = point.r
        sharp_gens = []
        for g in point.monoid.generators:
            a = point.z_coordinates(g)[: self.r]
            if any(a) and a not in sharp_gens:
                sharp_gens.append(a)
        if grading is not None:
            grading = tuple(int(x) for x in grading)
            if len(grading) != self.r:
                raise ValidationError(f"grading must have length r = {self.r}", grading)
        self.sharp_monoid = AffineMonoid(self.r, sharp_gens, grading=grading)
        self.grading = self.sharp_monoid.positive_grading  # raises NoPositiveGrading

    @cached_property
    def _key(self):
        return (self.point, self.order, self.grading)

    def __eq__(self, other):
        return self is other or (isinstance(other, LocalModel) and self._key == other._key)

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"LocalModel(m={self.m}, r={self.r}, order={self.order})"

    @property
    def split(self):
        return self.point.split

    @property
    def unit_values(self) -> tuple:
        return self.point.values

    @cached_property
    def zero_key(self) -> tuple:
        return (0,) * self.m

    def weight(self, key) -> int:
        r = self.r
        return sum(h * a for h, a in zip(self.grading, key[:r])) + sum(key[r:])

    def is_key(self, key) -> bool:
        key = tuple(key)
        return (
            len(key) == self.m
            and all(d >= 0 for d in key[self.r :])
            and key[: self.r] in self.sharp_monoid
        )

    @cached_property
    def universe(self) -> list:
        """All keys of weight <= order, sorted by (weight, key)."""
        u = self.m - self.r
        keys = []
        for a in self.sharp_monoid.elements_up_to(self.order):
            rest = self.order - self.weight(a + (0,) * u)
            for d in _compositions_up_to(u, rest):
                keys.append(a + d)
        keys.sort(key=lambda k: (self.weight(k), k))
        return keys

    @cached_property
    def weights(self) -> dict:
        return {k: self.weight(k) for k in self.universe}

    # -- constructors ------------------------------------------------------

    def zero(self) -> Series:
        return Series(self, {}, INF)

    def one(self) -> Series:
        return self.constant(1)

    def constant(self, c) -> Series:
        c = self.field.raw(c)
        return Series(self, {} if not any(c) else {self.zero_key: c}, INF)

    def series(self, terms, precision=None) -> Series:
        """Series from ``(key, coefficient)`` pairs; exact unless ``precision``."""
        acc = {}
        pruned = False
        for key, c in terms:
            key = tuple(int(x) for x in key)
            if not self.is_key(key):
                raise ValidationError("not a monomial of the local ring", key)
            if self.weight(key) > self.order:
                pruned = True
                continue
            c = self.field.raw(c)
            acc[key] = self.field.add(acc[key], c) if key in acc else c
        acc = {k: c for k, c in acc.items() if any(c)}
        prec = INF if precision is None else min(int(precision), self.order)
        if pruned:
            prec = min(prec, self.order)
        return Series(self, acc, prec)

    def s(self, i: int) -> Series:
        """The unit-direction variable s_i, for r < i <= m (1-based)."""
        if not self.r < i <= self.m:
            raise ValidationError(f"s_{i} is not a unit direction", i)
        key = [0] * self.m
        key[i - 1] = 1
        return self.series([(key, 1)])

    def z(self, i: int) -> Series:
        """The basis character z_i (1-based) as a series."""
        e = [0] * self.m
        e[i - 1] = 1
        return self.z_monomial(e)

    def z_monomial(self, exponent) -> Series:
        """z^exponent for an exponent vector in the split basis."""
        exponent = tuple(int(x) for x in exponent)
        a, b = exponent[: self.r], exponent[self.r :]
        if a not in self.sharp_monoid:
            raise NotMonomialTimesUnit("character is not regular at the point", exponent)
        base = a + (0,) * (self.m - self.r)
        room = self.order - self.weight(base)
        if room < 0:
            return Series(self, {}, self.order)
        field = self.field
        scale = field.raw(self.point.character_value(b))
        terms = {base: scale}
        exact = True
        for pos, e in enumerate(b):
            if not e:
                continue
            coeffs = _binomial_coefficients(e, room)
            if e < 0:
                exact = False
            new = {}
            for key, c in terms.items():
                left = room - (self.weight(key) - self.weight(base))
                if e > left:
                    exact = False
                for k, bc in enumerate(coeffs[: left + 1]):
                    if bc:
                        nk = list(key)
                        nk[self.r + pos] += k
                        new[tuple(nk)] = field.scale(c, bc)
            terms = new
        return Series(self, terms, INF if exact else self.order)

    def character(self, v) -> Series:
        """chi^v for a lattice vector in ambient coordinates."""
        return self.z_monomial(self.point.z_coordinates(v))


def _compositions_up_to(n: int, total: int):
    """All tuples of n nonnegative ints with sum <= total."""
    if n == 0:
        yield ()
        return
    for first in range(total + 1):
        for rest in _compositions_up_to(n - 1, total - first):
            yield (first,) + rest


def _binomial_coefficients(e, count):
    """binom(e, k) for k = 0..count, any rational e."""
    out = [mpq(1)]
    for k in range(1, count + 1):
        out.append(out[-1] * (e - k + 1) / k)
    return out


class Series:
    """Truncated element of the local ring of ``model``; treat as immutable."""

    __slots__ = ("model", "terms", "prec")

    def __init__(self, model: LocalModel, terms: dict, prec=INF):
        self.model = model
        self.terms = terms
        self.prec = prec

    # -- helpers ------------------------------------------------------------

    def _check(self, other):
        if not isinstance(other, Series):
            return False
        if other.model is not self.model and other.model != self.model:
            raise ModelMismatch("series live in different local models")
        return True

    def _lift(self, other):
        if isinstance(other, Series):
            self._check(other)
            return other
        if isinstance(other, (Scalar, int)) or type(other).__name__ in ("mpq", "Fraction"):
            return self.model.constant(other)
        return None

    def valuation(self):
        """Smallest weight carrying a nonzero coefficient (inf for zero)."""
        if not self.terms:
            return INF
        w = self.model.weights
        return min(w.get(k) or self.model.weight(k) for k in self.terms)

    def _val(self):
        # valuation as far as known: an unknown tail counts from prec + 1
        return min(self.valuation(), self.prec + 1)

    @property
    def constant_term(self):
        return self.terms.get(self.model.zero_key, self.model.field.zero)

    def value_at_point(self) -> Scalar:
        return Scalar(self.model.field, self.constant_term)

    def is_unit(self) -> bool:
        return any(self.constant_term)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, key) -> Scalar:
        return Scalar(self.model.field, self.terms.get(tuple(key), self.model.field.zero))

    def sorted_terms(self):
        w = self.model.weight
        return sorted(self.terms.items(), key=lambda kv: (w(kv[0]), kv[0]))

    def truncate(self, weight) -> Series:
        w = self.model.weight
        return Series(self.model, {k: c for k, c in self.terms.items() if w(k) <= weight}, min(self.prec, weight))

    # -- ring operations ------------------------------------------------------

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        f = self.model.field
        out = dict(self.terms)
        for k, c in other.terms.items():
            if k in out:
                s = f.add(out[k], c)
                if any(s):
                    out[k] = s
                else:
                    del out[k]
            else:
                out[k] = c
        return Series(self.model, out, min(self.prec, other.prec))

    __radd__ = __add__

    def __neg__(self):
        f = self.model.field
        return Series(self.model, {k: f.neg(c) for k, c in self.terms.items()}, self.prec)

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> Series:
        f = self.model.field
        c = f.raw(c)
        if not any(c):
            return Series(self.model, {}, self.prec)
        return Series(self.model, {k: f.mul(v, c) for k, v in self.terms.items()}, self.prec)

    def __mul__(self, other):
        if isinstance(other, Series):
            self._check(other)
            return _mul(self, other)
        if isinstance(other, (Scalar, int)) or type(other).__name__ in ("mpq", "Fraction"):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Series):
            return self * other.inverse()
        return self.scale(self.model.field.inv(self.model.field.raw(other)))

    def inverse(self) -> Series:
        """Multiplicative inverse of a unit."""
        model, f = self.model, self.model.field
        c0 = self.constant_term
        if not any(c0):
            raise NotAUnit("constant term is zero", self)
        inv0 = f.inv(c0)
        rest = [(k, c) for k, c in self.terms.items() if k != model.zero_key]
        if not rest:
            return Series(model, {model.zero_key: inv0}, self.prec)
        # (u * v)_k = 0 for k != 0, solved in weight order
        res = _weighted_recursion(
            model,
            rest,
            start=inv0,
            step=lambda k, acc: f.neg(f.mul(inv0, acc)),
        )
        return Series(model, res, min(self.prec, model.order))

    def __pow__(self, n: int) -> Series:
        n = int(n)
        if n < 0:
            return self.inverse() ** (-n)
        result = self.model.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def exp(self) -> Series:
        model, f = self.model, self.model.field
        if any(self.constant_term):
            raise BadConstantTerm("exp needs constant term 0", self.value_at_point())
        if not self.terms:
            return model.one().with_prec(self.prec)
        w = model.weights
        euler = [(k, f.scale(c, w[k])) for k, c in self.terms.items()]
        res = _weighted_recursion(
            model,
            euler,
            start=f.one,
            step=lambda k, acc: f.scale(acc, mpq(1, w[k])),
        )
        return Series(model, res, min(self.prec, model.order))

    def log(self) -> Series:
        model, f = self.model, self.model.field
        if self.constant_term != f.one:
            raise BadConstantTerm("log needs constant term 1", self.value_at_point())
        rest = [(k, c) for k, c in self.terms.items() if k != model.zero_key]
        if not rest:
            return model.zero().with_prec(self.prec)
        w = model.weights
        # E(L) u = E(u):  L_k = u_k - (1/w(k)) sum_{k2 != 0} w(k - k2) L_{k-k2} u_{k2}
        res = {}
        zero = model.zero_key
        for k in model.universe:
            if k == zero:
                continue
            acc = None
            for k2, c2 in rest:
                k1 = tuple(x - y for x, y in zip(k, k2))
                l1 = res.get(k1)
                if l1 is not None:
                    t = f.scale(f.mul(l1, c2), w[k1])
                    acc = t if acc is None else f.add(acc, t)
            val = self.terms.get(k, f.zero)
            if acc is not None:
                val = f.sub(val, f.scale(acc, mpq(1, w[k])))
            if any(val):
                res[k] = val
        return Series(model, res, min(self.prec, model.order))

    def with_prec(self, prec) -> Series:
        return Series(self.model, self.terms, prec)

    # -- monomials -----------------------------------------------------------

    def times_sharp_monomial(self, a) -> Series:
        model = self.model
        a = tuple(a) + (0,) * (model.m - model.r)
        shift = model.weight(a)
        out = {}
        pruned = False
        for k, c in self.terms.items():
            nk = tuple(x + y for x, y in zip(k, a))
            if model.weight(nk) <= model.order:
                out[nk] = c
            else:
                pruned = True
        prec = self.prec + shift
        if pruned or prec != INF:
            prec = min(prec, model.order)
        return Series(model, out, prec)

    def divide_sharp_monomial(self, a) -> Series:
        """Exact quotient by the sharp monomial z^a (must divide every term)."""
        model = self.model
        a = tuple(a) + (0,) * (model.m - model.r)
        out = {}
        for k, c in self.terms.items():
            nk = tuple(x - y for x, y in zip(k, a))
            if not model.is_key(nk):
                raise NotMonomialTimesUnit("monomial does not divide the series", (a, k))
            out[nk] = c
        return Series(model, out, self.prec - model.weight(a))

    # -- differentials -----------------------------------------------------

    def dlog_coefficients(self) -> list:
        """[a_1, ..., a_m] with dy = sum a_i dz_i / z_i.

        Sharp directions: z_i d/dz_i multiplies by the exponent.  Unit
        directions: z_i d/dz_i = (1 + s_i) d/ds_i.
        """
        model, f = self.model, self.model.field
        r, m = model.r, model.m
        outs = [dict() for _ in range(m)]

        def put(i, key, c):
            d = outs[i]
            if key in d:
                s = f.add(d[key], c)
                if any(s):
                    d[key] = s
                else:
                    del d[key]
            elif any(c):
                d[key] = c

        for k, c in self.terms.items():
            for i in range(r):
                if k[i]:
                    put(i, k, f.scale(c, k[i]))
            for i in range(r, m):
                if k[i]:
                    dc = f.scale(c, k[i])
                    lower = k[:i] + (k[i] - 1,) + k[i + 1 :]
                    put(i, lower, dc)
                    put(i, k, dc)
        unit_prec = self.prec - 1 if self.prec != INF else INF
        return [Series(model, outs[i], self.prec if i < r else unit_prec) for i in range(m)]

    def restrict_to_orbit(self) -> Series:
        """Reduce modulo the ideal of the orbit of x (drop keys with sharp part)."""
        r = self.model.r
        return Series(self.model, {k: c for k, c in self.terms.items() if not any(k[:r])}, self.prec)

    # -- comparison / display ---------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Series):
            return self.model == other.model and self.terms == other.terms
        lifted = self._lift(other)
        if lifted is None:
            return NotImplemented
        return self.terms == lifted.terms

    __hash__ = None

    def first_difference(self, other, up_to=None):
        """Lowest weight where self and other differ (within ``up_to``), or None."""
        diff = self - other
        w = self.model.weight
        bad = [w(k) for k in diff.terms if up_to is None or w(k) <= up_to]
        return min(bad) if bad else None

    def agrees_with(self, other, up_to) -> bool:
        return self.first_difference(other, up_to) is None

    def __repr__(self):
        return f"Series({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        model = self.model
        r = model.r
        parts = []
        for k, c in self.sorted_terms():
            mono = []
            for i, e in enumerate(k):
                name = f"z{i + 1}" if i < r else f"s{i + 1}"
                if e == 1:
                    mono.append(name)
                elif e:
                    mono.append(f"{name}^{e}")
            coef = str(Scalar(model.field, c))
            if not mono:
                parts.append(coef)
            elif coef == "1":
                parts.append("*".join(mono))
            else:
                parts.append(f"({coef})*" + "*".join(mono))
        tail = "" if self.prec == INF else f" + O(w>{self.prec})"
        return " + ".join(parts) + tail


def _mul(a: Series, b: Series) -> Series:
    model, f = a.model, a.model.field
    N = model.order
    w = model.weights
    bs = sorted(((w[k], k, c) for k, c in b.terms.items()), key=lambda t: t[0])
    out = {}
    pruned = False
    for ka, ca in a.terms.items():
        wa = w[ka]
        for wb, kb, cb in bs:
            if wa + wb > N:
                pruned = True
                break
            key = tuple(x + y for x, y in zip(ka, kb))
            prod = f.mul(ca, cb)
            if key in out:
                out[key] = f.add(out[key], prod)
            else:
                out[key] = prod
    out = {k: c for k, c in out.items() if any(c)}
    prec = min(a.prec + b._val(), b.prec + a._val())
    if pruned or prec != INF:
        prec = min(prec, N)
    return Series(model, out, prec)


def _weighted_recursion(model, rest, start, step):
    """res_0 = start; res_k = step(k, sum_{k2 in rest} res_{k-k2} * c2)."""
    f = model.field
    zero = model.zero_key
    res = {zero: start}
    for k in model.universe:
        if k == zero:
            continue
        acc = None
        for k2, c2 in rest:
            k1 = tuple(x - y for x, y in zip(k, k2))
            r1 = res.get(k1)
            if r1 is not None:
                t = f.mul(r1, c2)
                acc = t if acc is None else f.add(acc, t)
        if acc is not None:
            val = step(k, acc)
            if any(val):
                res[k] = val
    return res


# -- function-style API ------------------------------------------------------


def series_arithmetic(a: Series, b: Series | None, op: str) -> Series:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "invert":
        return a.inverse()
    raise ValueError(f"unknown op {op!r}")


def series_exp_log(a: Series, op: str) -> Series:
    if op == "exp":
        return a.exp()
    if op == "log":
        return a.log()
    raise ValueError(f"unknown op {op!r}")


def dlog_coefficients(y: Series) -> list:
    return y.dlog_coefficients()


def value_at_point(a: Series) -> Scalar:
    return a.value_at_point()


@dataclass(frozen=True)
class MonomialUnitForm:
    """y = z^exponent * unit; ``exponent`` is in the split basis."""

    exponent: tuple
    unit: Series

    def reassemble(self) -> Series:
        r = self.unit.model.r
        return self.unit.times_sharp_monomial(self.exponent[:r])


def extract_monomial_unit(y: Series) -> MonomialUnitForm:
    """Write y as (sharp monomial) * (unit); the unit-direction exponent is 0."""
    model = y.model
    if y.is_zero():
        raise NotMonomialTimesUnit("zero has no monomial part", None)
    r, m = model.r, model.m
    sharp = model.sharp_monoid
    cands = sorted(
        {k[:r] for k in y.terms if not any(k[r:])},
        key=lambda a: (model.weight(a + (0,) * (m - r)), a),
    )
    for a in cands:
        if all(tuple(x - z for x, z in zip(k[:r], a)) in sharp for k in y.terms):
            return MonomialUnitForm(a + (0,) * (m - r), y.divide_sharp_monomial(a))
    raise NotMonomialTimesUnit(
        "no support monomial divides all others with unit quotient", sorted(y.terms)
    )
