"""Affine monoids, points of affine toric varieties, toric morphisms.

A point of Spec k[S] is a pair (face, character): the generators of S that
do not vanish at the point, and the values of a basis of the face lattice.
Lattice vectors are tuples of ints in the ambient coordinates of Z^m.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

from . import intlat
from .errors import InvalidPoint, NoPositiveGrading, NotInBaseField, ValidationError
from .fields import FieldSpec, Scalar, rational_value

_GRADING_SEARCH_HEIGHT = 3


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


@dataclass(frozen=True)
class AffineMonoid:
    """Finitely generated submonoid of Z^m of full rank.

    Z^m is the character lattice used for all coordinates; the generators
    must span it rationally (the index of the group they generate is
    :attr:`lattice_index`).  ``saturated`` is the author's declaration,
    relative to that group; see :meth:`spot_check_saturation`.
    """

    rank: int
    generators: tuple
    labels: tuple = ()
    grading: tuple | None = None
    saturated: bool = True

    def __post_init__(self):
        gens = tuple(tuple(int(x) for x in g) for g in self.generators)
        object.__setattr__(self, "generators", gens)
        labels = tuple(self.labels) or tuple(f"g{i}" for i in range(len(gens)))
        object.__setattr__(self, "labels", labels)
        if len(labels) != len(gens):
            raise ValidationError("one label per generator required", labels)
        if len(set(labels)) != len(labels):
            raise ValidationError("duplicate generator labels", labels)
        if any(len(g) != self.rank for g in gens):
            raise ValidationError("generator of wrong length", gens)
        if self.grading is not None:
            object.__setattr__(self, "grading", tuple(int(x) for x in self.grading))

    @cached_property
    def lattice_index(self) -> int:
        """Index of the generated group in Z^m (0 if not of full rank)."""
        if self.rank == 0:
            return 1
        if not self.generators:
            return 0
        diag = intlat.snf_diagonal(intlat.from_columns([list(g) for g in self.generators], self.rank))
        if len(diag) < self.rank:
            return 0
        out = 1
        for x in diag:
            out *= x
        return out

    def check_full_rank(self):
        if self.lattice_index == 0:
            raise ValidationError("generators do not span the lattice rationally", self.generators)

    def in_group(self, v) -> bool:
        return intlat.in_row_lattice(self.generators, v)

    @cached_property
    def positive_grading(self) -> tuple:
        """An integer functional positive on every nonzero generator."""
        nonzero = [g for g in self.generators if any(g)]
        if self.grading is not None:
            if all(_dot(self.grading, g) > 0 for g in nonzero):
                return self.grading
            raise NoPositiveGrading("declared grading is not positive", self.grading)
        ones = (1,) * self.rank
        if all(_dot(ones, g) > 0 for g in nonzero):
            return ones
        rng = range(-_GRADING_SEARCH_HEIGHT, _GRADING_SEARCH_HEIGHT + 1)
        for h in sorted(itertools.product(rng, repeat=self.rank), key=lambda h: (sum(map(abs, h)), h)):
            if all(_dot(h, g) > 0 for g in nonzero):
                return h
        raise NoPositiveGrading("no positive grading found", self.generators)

    def weight(self, v) -> int:
        return _dot(self.positive_grading, v)

    def __contains__(self, v) -> bool:
        return self._member(tuple(int(x) for x in v))

    @cached_property
    def _member(self):
        gens = [(g, self.weight(g)) for g in self.generators if any(g)]

        @lru_cache(maxsize=None)
        def member(v):
            if not any(v):
                return True
            w = self.weight(v)
            if w <= 0:
                return False
            for g, wg in gens:
                if wg <= w and member(tuple(a - b for a, b in zip(v, g))):
                    return True
            return False

        return member

    def elements_up_to(self, max_weight: int) -> list[tuple]:
        """Every monoid element of weight <= max_weight, sorted by (weight, vector)."""
        gens = [g for g in self.generators if any(g)]
        seen = {(0,) * self.rank}
        frontier = list(seen)
        while frontier:
            nxt = []
            for v in frontier:
                for g in gens:
                    u = tuple(a + b for a, b in zip(v, g))
                    if u not in seen and self.weight(u) <= max_weight:
                        seen.add(u)
                        nxt.append(u)
            frontier = nxt
        return sorted(seen, key=lambda v: (self.weight(v), v))

    def spot_check_saturation(self, cutoff: int = 6):
        """Return a witness p with k*p in S, p not in S (k <= 3, weight <= cutoff), or None."""
        for q in self.elements_up_to(3 * cutoff):
            for k in (2, 3):
                if all(x % k == 0 for x in q):
                    p = tuple(x // k for x in q)
                    if self.weight(p) <= cutoff and self.in_group(p) and p not in self:
                        return p
        return None


def monoid_membership(s: AffineMonoid, v) -> bool:
    return tuple(v) in s


def is_face(monoid: AffineMonoid, face) -> bool:
    """Pairwise test: g + g' in the face monoid forces g, g' in the face."""
    face = set(face)
    face_monoid = AffineMonoid(
        monoid.rank,
        [monoid.generators[i] for i in sorted(face)],
        grading=monoid.positive_grading,
    )
    for i, j in itertools.combinations_with_replacement(range(len(monoid.generators)), 2):
        if i in face and j in face:
            continue
        s = tuple(a + b for a, b in zip(monoid.generators[i], monoid.generators[j]))
        if s in face_monoid:
            return False
    return True


@dataclass(frozen=True, eq=False)
class ToricPoint:
    """A k(x)-point of Spec k[S]: a face of S plus values on its lattice.

    The face lattice is the saturation in Z^m of the span of the face
    generators.  ``values`` are the values of the last m - r vectors of
    ``split_basis(face lattice)`` -- the characters defined and nonvanishing
    at the point.
    """

    monoid: AffineMonoid
    face: tuple
    values: tuple
    field: FieldSpec = field(default_factory=FieldSpec.rationals)

    def __post_init__(self):
        face = tuple(sorted(set(int(i) for i in self.face)))
        object.__setattr__(self, "face", face)
        if any(not 0 <= i < len(self.monoid.generators) for i in face):
            raise InvalidPoint("face index out of range", face)
        values = tuple(self.field(v) for v in self.values)
        object.__setattr__(self, "values", values)
        if not is_face(self.monoid, face):
            raise InvalidPoint("generator subset is not a face", face)
        split = self.split  # raises NotSaturated
        if len(values) != split.m - split.r:
            raise InvalidPoint(
                f"expected {split.m - split.r} character values, got {len(values)}", values
            )
        if any(v.is_zero() for v in values):
            raise InvalidPoint("character values must be nonzero", values)

    def __eq__(self, other):
        return isinstance(other, ToricPoint) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    @cached_property
    def _key(self):
        return (self.monoid, self.face, tuple(v.c for v in self.values), self.field)

    @cached_property
    def split(self) -> intlat.BasisSplit:
        m = self.monoid.rank
        cols = intlat.saturation_basis([self.monoid.generators[i] for i in self.face], m)
        return intlat.split_basis(intlat.from_columns(cols, m), m)

    @cached_property
    def basis_inverse(self):
        return intlat.integer_inverse(self.split.matrix())

    @property
    def r(self) -> int:
        return self.split.r

    def z_coordinates(self, v) -> tuple:
        """Coordinates of a lattice vector in the split basis z_1..z_m."""
        return tuple(intlat.matvec(self.basis_inverse, list(v)))

    def in_face_lattice(self, v) -> bool:
        return not any(self.z_coordinates(v)[: self.r])

    def character_value(self, unit_exponents) -> Scalar:
        val = self.field(1)
        for x, e in zip(self.values, unit_exponents):
            if e:
                val = val * x ** e
        return val


def eval_character(p: ToricPoint, v):
    """Value of the character chi^v at p.

    Returns a nonzero Scalar, the zero Scalar (v in S but vanishing at p),
    or None when chi^v is not defined at p.
    """
    v = tuple(v)
    if p.in_face_lattice(v):
        return p.character_value(p.z_coordinates(v)[p.r :])
    if v in p.monoid:
        return p.field(0)
    return None


@dataclass(frozen=True)
class ToricMorphismData:
    """Monomial map; row j is the exponent vector of the pullback of c_j."""

    source_rank: int
    target_rank: int
    lattice_map: tuple

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in row) for row in self.lattice_map)
        object.__setattr__(self, "lattice_map", rows)
        if len(rows) != self.target_rank or any(len(r) != self.source_rank for r in rows):
            raise ValidationError("lattice map has the wrong shape", rows)

    def pullback(self, target_vector) -> tuple:
        out = [0] * self.source_rank
        for t, row in zip(target_vector, self.lattice_map):
            if t:
                out = [o + t * x for o, x in zip(out, row)]
        return tuple(out)


def is_regular_toric_morphism(g: ToricMorphismData, source: AffineMonoid, target: AffineMonoid):
    """``(True, None)`` or ``(False, offending target generator)``."""
    for gen in target.generators:
        if g.pullback(gen) not in source:
            return False, gen
    return True, None


@dataclass(frozen=True)
class TranslationPoint:
    """k-point of the target torus; ``values[j]`` is c_j at the point."""

    values: tuple

    def is_identity(self) -> bool:
        return all(v == 1 for v in self.values)


def translation_from_lambda(lambdas, base_field: FieldSpec | None = None) -> TranslationPoint:
    """The torus point where c_j takes the value 1/lambda_j."""
    out = []
    for j, lam in enumerate(lambdas):
        if lam.is_zero():
            raise NotInBaseField(f"lambda_{j + 1} is zero", lam)
        if base_field is not None and base_field != lam.field:
            q = rational_value(lam)
            if q is None or not base_field.is_rationals:
                raise NotInBaseField(f"lambda_{j + 1} is not in the base field", lam)
            lam = base_field(q)
        out.append(lam.inverse())
    return TranslationPoint(tuple(out))
