"""Logarithmic Jacobian of a morphism germ and the log-smoothness test."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import SearchExhausted, ValidationError
from .fields import FieldSpec, Scalar
from .series import LocalModel, Series, extract_monomial_unit
from .toric import AffineMonoid

AUGMENT_HEIGHT = 10


@dataclass(frozen=True)
class MorphismGerm:
    """Germ at x of f: X -> V_B, given by the pullbacks f*(c_j) of a basis
    c_1..c_n of the target character lattice (the coordinates of
    ``target_monoid``)."""

    model: LocalModel
    target_monoid: AffineMonoid
    pullbacks: tuple
    base_field: FieldSpec = field(default_factory=FieldSpec.rationals)

    def __post_init__(self):
        object.__setattr__(self, "pullbacks", tuple(self.pullbacks))
        if any(p.is_zero() for p in self.pullbacks):
            raise ValidationError("pullbacks must be nonzero", self.pullbacks)
        if any(p.model != self.model for p in self.pullbacks):
            raise ValidationError("pullbacks must live in the source model", None)
        if self.n > self.m:
            raise ValidationError("target dimension exceeds source dimension", (self.n, self.m))
        if self.target_monoid.rank != self.n:
            raise ValidationError("target monoid rank must equal the number of pullbacks", self.n)
        if not self.model.field.contains_field(self.base_field):
            raise ValidationError("base field does not embed in the residue field", self.base_field)

    @property
    def n(self) -> int:
        return len(self.pullbacks)

    @property
    def m(self) -> int:
        return self.model.m


@dataclass(frozen=True)
class LogJacobian:
    entries: tuple  # n rows of m Series
    exponents: tuple  # monomial exponent (split basis) of each pullback

    @property
    def at_point(self) -> list[list[Scalar]]:
        return [[e.value_at_point() for e in row] for row in self.entries]


def jacobian_row(y: Series):
    """(exponent, row) with dy/y = sum row_i dz_i/z_i, for y = monomial * unit."""
    form = extract_monomial_unit(y)
    u = form.unit
    uinv = u.inverse()
    row = []
    for e, a in zip(form.exponent, u.dlog_coefficients()):
        row.append(a * uinv + e)
    return form.exponent, tuple(row)


def log_jacobian(f: MorphismGerm) -> LogJacobian:
    rows, exps = [], []
    for p in f.pullbacks:
        e, row = jacobian_row(p)
        exps.append(e)
        rows.append(row)
    return LogJacobian(tuple(rows), tuple(exps))


def field_rank(mat, field: FieldSpec) -> int:
    """Rank over ``field`` of a matrix of Scalars."""
    rows = [[field.raw(x) for x in row] for row in mat]
    if not rows:
        return 0
    ncols = len(rows[0])
    rk = 0
    for col in range(ncols):
        piv = next((i for i in range(rk, len(rows)) if any(rows[i][col])), None)
        if piv is None:
            continue
        rows[rk], rows[piv] = rows[piv], rows[rk]
        inv = field.inv(rows[rk][col])
        for i in range(rk + 1, len(rows)):
            if any(rows[i][col]):
                fac = field.mul(rows[i][col], inv)
                rows[i] = [field.sub(x, field.mul(fac, y)) for x, y in zip(rows[i], rows[rk])]
        rk += 1
    return rk


def field_det(mat, field: FieldSpec) -> Scalar:
    rows = [[field.raw(x) for x in row] for row in mat]
    n = len(rows)
    acc = field.one
    for col in range(n):
        piv = next((i for i in range(col, n) if any(rows[i][col])), None)
        if piv is None:
            return field(0)
        if piv != col:
            rows[col], rows[piv] = rows[piv], rows[col]
            acc = field.neg(acc)
        acc = field.mul(acc, rows[col][col])
        inv = field.inv(rows[col][col])
        for i in range(col + 1, n):
            if any(rows[i][col]):
                fac = field.mul(rows[i][col], inv)
                rows[i] = [field.sub(x, field.mul(fac, y)) for x, y in zip(rows[i], rows[col])]
    return Scalar(field, acc)


@dataclass(frozen=True)
class SmoothnessVerdict:
    smooth: bool
    rank: int
    n: int
    jacobian_at_point: tuple
    minor_columns: tuple | None  # certificate: a nonvanishing n x n minor
    minor_det: Scalar | None

    @property
    def label(self) -> str:
        return "smooth" if self.smooth else "not_smooth"


def is_log_smooth(f: MorphismGerm, jac: LogJacobian | None = None) -> SmoothnessVerdict:
    """Smooth iff the log Jacobian at x has rank n over k(x)."""
    jac = jac or log_jacobian(f)
    jx = jac.at_point
    field = f.model.field
    rk = field_rank(jx, field)
    cols, minor = None, None
    if rk == f.n:
        for cols in itertools.combinations(range(f.m), f.n):
            minor = field_det([[row[c] for c in cols] for row in jx], field)
            if not minor.is_zero():
                break
    return SmoothnessVerdict(
        rk == f.n,
        rk,
        f.n,
        tuple(tuple(r) for r in jx),
        cols if rk == f.n else None,
        minor if rk == f.n else None,
    )


def _candidates(m: int, height: int):
    for h in range(1, height + 1):
        rng = range(-h, h + 1)
        for v in itertools.product(rng, repeat=m):
            if max(map(abs, v)) == h:
                yield v


@dataclass(frozen=True)
class Augmentation:
    germ: MorphismGerm
    appended: tuple  # lattice vectors v with pullback chi^v


def augment_to_equal_dim(f: MorphismGerm) -> Augmentation:
    """Append monomial pullbacks chi^v (v in S, increasing height, then
    lexicographic) until the log Jacobian at x is square and invertible."""
    verdict = is_log_smooth(f)
    if not verdict.smooth:
        from .errors import NotLogSmooth

        raise NotLogSmooth("cannot augment a germ that is not log smooth", verdict.rank)
    model = f.model
    if f.n == f.m:
        return Augmentation(f, ())
    field = model.field
    rows = [list(r) for r in verdict.jacobian_at_point]
    appended = []
    point = model.point
    for v in _candidates(f.m, AUGMENT_HEIGHT):
        if len(rows) == f.m:
            break
        if v not in point.monoid:
            continue
        zrow = [field(x) for x in point.z_coordinates(v)]
        if field_rank(rows + [zrow], field) == len(rows) + 1:
            rows.append(zrow)
            appended.append(v)
    if len(rows) != f.m:
        raise SearchExhausted(f"no completion within height {AUGMENT_HEIGHT}", appended)
    k = len(appended)
    tgt = f.target_monoid
    gens = [tuple(g) + (0,) * k for g in tgt.generators]
    gens += [tuple(int(i == j) for i in range(f.n + k)) for j in range(f.n, f.n + k)]
    labels = tuple(tgt.labels) + tuple(f"aug{j + 1}" for j in range(k))
    target = AffineMonoid(f.n + k, gens, labels=labels)
    pullbacks = f.pullbacks + tuple(model.character(v) for v in appended)
    return Augmentation(MorphismGerm(model, target, pullbacks, f.base_field), tuple(appended))
