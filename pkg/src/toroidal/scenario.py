"""Scenario documents: parsing, validation, serialization and reports.

A scenario is one JSON object.  Exact values never pass through floats:
rationals are strings such as ``"-3/4"`` (or JSON integers), elements of a
number field are lists of such strings in the power basis.  Exponent keys
are arrays of integers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import ParseError, ValidationError
from .fields import FieldSpec, Scalar, to_mpq
from .logjac import MorphismGerm
from .monomialize import MODES, RATIONAL_RESIDUE, DiagramReport, MonomializationResult
from .series import INF, LocalModel, Series
from .toric import AffineMonoid, ToricMorphismData, ToricPoint, TranslationPoint

SCHEMA_VERSION = 1

_TOP_KEYS = {
    "schema_version", "name", "base_field", "residue_field", "source_monoid",
    "target_monoid", "point", "grading", "truncation", "mode", "pullbacks",
    "assertions",
}
_REQUIRED = _TOP_KEYS - {"grading", "assertions", "base_field", "mode"}


# -- scalars and fields ----------------------------------------------------


def parse_scalar(obj, fld: FieldSpec, where: str) -> Scalar:
    if isinstance(obj, bool) or isinstance(obj, float):
        raise ParseError(f"{where}: exact value expected, got {obj!r}", where)
    try:
        if isinstance(obj, list):
            if len(obj) != fld.degree:
                raise ParseError(f"{where}: expected {fld.degree} coefficients", where)
            for c in obj:
                if isinstance(c, (bool, float)):
                    raise ParseError(f"{where}: exact value expected, got {c!r}", where)
            return Scalar(fld, tuple(to_mpq(c) for c in obj))
        if isinstance(obj, (int, str)):
            return fld(to_mpq(obj))
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ParseError(f"{where}: bad number {obj!r} ({exc})", where) from None
    raise ParseError(f"{where}: bad number {obj!r}", where)


def dump_scalar(x: Scalar):
    if x.field.is_rationals:
        return str(x.c[0])
    return [str(c) for c in x.c]


def parse_field(obj, where: str) -> FieldSpec:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ParseError(f"{where}: field object with a 'kind' expected", where)
    if obj["kind"] == "rationals":
        return FieldSpec.rationals()
    if obj["kind"] == "number_field":
        poly = _int_list(obj.get("min_poly"), f"{where}.min_poly")
        return FieldSpec.number_field(poly, obj.get("generator", "t"), bool(obj.get("trusted", False)))
    raise ParseError(f"{where}: unknown field kind {obj['kind']!r}", where)


def dump_field(fld: FieldSpec) -> dict:
    if fld.is_rationals:
        return {"kind": "rationals"}
    out = {"kind": "number_field", "min_poly": list(fld.min_poly), "generator": fld.label}
    if fld.trusted:
        out["trusted"] = True
    return out


def _int_list(obj, where):
    if not isinstance(obj, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in obj):
        raise ParseError(f"{where}: list of integers expected", where)
    return obj


def _get(obj, key, where, kind=None):
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: object expected", where)
    if key not in obj:
        raise ValidationError(f"{where}: missing {key!r}", where)
    val = obj[key]
    if kind is not None and (not isinstance(val, kind) or isinstance(val, bool)):
        raise ParseError(f"{where}.{key}: {kind.__name__} expected", f"{where}.{key}")
    return val


# -- monoids ---------------------------------------------------------------


def parse_monoid(obj, where: str) -> AffineMonoid:
    rank = _get(obj, "rank", where, int)
    gens = _get(obj, "generators", where, list)
    vectors, labels = [], []
    for k, g in enumerate(gens):
        loc = f"{where}.generators[{k}]"
        labels.append(str(_get(g, "label", loc)))
        vectors.append(tuple(_int_list(_get(g, "vector", loc), f"{loc}.vector")))
    monoid = AffineMonoid(
        rank, vectors, labels=tuple(labels), saturated=bool(obj.get("saturated", True))
    )
    monoid.check_full_rank()
    if not monoid.saturated:
        raise ValidationError(f"{where}: only saturated monoids are supported", where)
    return monoid


def dump_monoid(s: AffineMonoid) -> dict:
    return {
        "rank": s.rank,
        "generators": [{"label": l, "vector": list(g)} for l, g in zip(s.labels, s.generators)],
        "saturated": s.saturated,
    }


# -- pullbacks -------------------------------------------------------------


@dataclass(frozen=True)
class PullbackSpec:
    """A pullback f*(c_j) as stored in a scenario.

    ``kind`` is ``"terms"`` (keys of the local model: sharp exponent, then
    s-degrees) or ``"characters"`` (ambient lattice vectors, read as chi^v).
    ``precision`` None means the data is exact.
    """

    kind: str
    entries: tuple
    precision: int | None = None

    def build(self, model: LocalModel) -> Series:
        if self.kind == "terms":
            return model.series(self.entries, self.precision)
        acc = model.zero()
        for v, c in self.entries:
            acc = acc + model.character(v).scale(c)
        if self.precision is not None:
            acc = acc.with_prec(min(acc.prec, self.precision))
        return acc


def parse_pullback(obj, fld: FieldSpec, where: str) -> PullbackSpec:
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: object expected", where)
    kinds = [k for k in ("terms", "characters") if k in obj]
    if len(kinds) != 1:
        raise ValidationError(f"{where}: exactly one of 'terms' or 'characters' required", where)
    kind = kinds[0]
    entries = []
    for k, item in enumerate(obj[kind]):
        loc = f"{where}.{kind}[{k}]"
        if not isinstance(item, list) or len(item) != 2:
            raise ParseError(f"{loc}: [exponent, coefficient] expected", loc)
        key = tuple(_int_list(item[0], loc))
        entries.append((key, parse_scalar(item[1], fld, loc)))
    prec = obj.get("precision")
    if prec is not None and (not isinstance(prec, int) or isinstance(prec, bool) or prec < 0):
        raise ParseError(f"{where}.precision: nonnegative integer expected", where)
    return PullbackSpec(kind, tuple(entries), prec)


def dump_pullback(p: PullbackSpec) -> dict:
    out = {p.kind: [[list(k), dump_scalar(c)] for k, c in p.entries]}
    if p.precision is not None:
        out["precision"] = p.precision
    return out


def dump_series(s: Series) -> dict:
    out = {"terms": [[list(k), dump_scalar(Scalar(s.model.field, c))] for k, c in s.sorted_terms()]}
    out["precision"] = None if s.prec == INF else int(s.prec)
    return out


# -- scenario --------------------------------------------------------------


@dataclass(frozen=True)
class Assertions:
    verdict: str | None = None  # "smooth" or "not_smooth"
    outcome: str | None = None  # "monomialized" or an error kind
    E: tuple | None = None
    lambdas: tuple | None = None


@dataclass(frozen=True)
class Scenario:
    name: str
    base_field: FieldSpec
    residue_field: FieldSpec
    source_monoid: AffineMonoid
    target_monoid: AffineMonoid
    face: tuple  # labels of the face generators
    values: tuple
    pullbacks: tuple
    truncation: int
    mode: str = RATIONAL_RESIDUE
    grading: tuple | None = None
    assertions: Assertions = field(default_factory=Assertions)

    def point(self) -> ToricPoint:
        index = {l: k for k, l in enumerate(self.source_monoid.labels)}
        missing = [l for l in self.face if l not in index]
        if missing:
            raise ValidationError(f"unknown face generator {missing[0]!r}", missing)
        return ToricPoint(
            self.source_monoid, tuple(index[l] for l in self.face), self.values, self.residue_field
        )

    def germ(self, order: int | None = None) -> MorphismGerm:
        order = self.truncation if order is None else order
        model = LocalModel(self.point(), order, self.grading)
        pulls = [p.build(model) for p in self.pullbacks]
        return MorphismGerm(model, self.target_monoid, pulls, self.base_field)


def parse_scenario(text: str) -> Scenario:
    try:
        doc = json.loads(text, parse_float=_reject_float)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}", (exc.lineno, exc.colno)) from None
    return scenario_from_dict(doc)


def _reject_float(s):
    raise ParseError(f"floating point literal {s} not allowed; use a 'num/den' string", s)


def scenario_from_dict(doc) -> Scenario:
    if not isinstance(doc, dict):
        raise ParseError("scenario must be a JSON object", None)
    unknown = sorted(set(doc) - _TOP_KEYS)
    if unknown:
        raise ParseError(f"unknown key {unknown[0]!r}", unknown[0])
    for key in sorted(_REQUIRED):
        if key not in doc:
            raise ValidationError(f"missing {key!r}", key)
    if doc["schema_version"] != SCHEMA_VERSION:
        raise ParseError(f"unsupported schema_version {doc['schema_version']!r}", "schema_version")
    residue = parse_field(doc["residue_field"], "residue_field")
    base = parse_field(doc.get("base_field", {"kind": "rationals"}), "base_field")
    source = parse_monoid(doc["source_monoid"], "source_monoid")
    target = parse_monoid(doc["target_monoid"], "target_monoid")
    pt = doc["point"]
    face = tuple(str(l) for l in _get(pt, "face", "point", list))
    values = tuple(
        parse_scalar(v, residue, f"point.values[{k}]") for k, v in enumerate(_get(pt, "values", "point", list))
    )
    pulls = doc["pullbacks"]
    if not isinstance(pulls, list) or not pulls:
        raise ValidationError("at least one pullback required", "pullbacks")
    pullbacks = tuple(parse_pullback(p, residue, f"pullbacks[{k}]") for k, p in enumerate(pulls))
    trunc = doc["truncation"]
    if not isinstance(trunc, int) or isinstance(trunc, bool) or trunc < 0:
        raise ParseError("truncation: nonnegative integer expected", "truncation")
    mode = doc.get("mode", RATIONAL_RESIDUE)
    if mode not in MODES:
        raise ParseError(f"mode must be one of {', '.join(MODES)}", "mode")
    grading = doc.get("grading")
    if grading is not None:
        grading = tuple(_int_list(grading, "grading"))
    scen = Scenario(
        name=str(doc["name"]),
        base_field=base,
        residue_field=residue,
        source_monoid=source,
        target_monoid=target,
        face=face,
        values=values,
        pullbacks=pullbacks,
        truncation=trunc,
        mode=mode,
        grading=grading,
        assertions=_parse_assertions(doc.get("assertions", {}), residue),
    )
    scen.germ()  # run every module-level validation now
    return scen


def _parse_assertions(obj, fld) -> Assertions:
    if not isinstance(obj, dict):
        raise ParseError("assertions: object expected", "assertions")
    E = obj.get("E")
    if E is not None:
        E = tuple(tuple(_int_list(row, "assertions.E")) for row in E)
    lam = obj.get("lambda")
    if lam is not None:
        lam = tuple(parse_scalar(x, fld, f"assertions.lambda[{k}]") for k, x in enumerate(lam))
    return Assertions(obj.get("verdict"), obj.get("outcome"), E, lam)


def scenario_to_dict(s: Scenario) -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "name": s.name,
        "base_field": dump_field(s.base_field),
        "residue_field": dump_field(s.residue_field),
        "source_monoid": dump_monoid(s.source_monoid),
        "target_monoid": dump_monoid(s.target_monoid),
        "point": {"face": list(s.face), "values": [dump_scalar(v) for v in s.values]},
        "truncation": s.truncation,
        "mode": s.mode,
        "pullbacks": [dump_pullback(p) for p in s.pullbacks],
    }
    if s.grading is not None:
        doc["grading"] = list(s.grading)
    a = s.assertions
    ad = {}
    if a.verdict is not None:
        ad["verdict"] = a.verdict
    if a.outcome is not None:
        ad["outcome"] = a.outcome
    if a.E is not None:
        ad["E"] = [list(row) for row in a.E]
    if a.lambdas is not None:
        ad["lambda"] = [dump_scalar(x) for x in a.lambdas]
    if ad:
        doc["assertions"] = ad
    return doc


def serialize_scenario(s: Scenario) -> str:
    return dumps(scenario_to_dict(s))


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# -- results ----------------------------------------------------------------


def result_to_dict(res: MonomializationResult) -> dict:
    field_ = res.germ.model.field
    out = {
        "mode": res.mode,
        "order": res.germ.model.order,
        "appended": [list(v) for v in res.appended],
        "jacobian_at_point": [[dump_scalar(x) for x in row] for row in res.jacobian_at_point],
        "E": [list(row) for row in res.E],
        "lambda": [dump_scalar(Scalar(field_, field_.raw(x))) for x in res.lambdas],
        "g": [list(row) for row in res.g.lattice_map],
        "t": [dump_scalar(Scalar(field_, field_.raw(x))) for x in res.t.values],
        "epsilon": [dump_series(e) for e in res.epsilon],
    }
    if res.verification is not None:
        out["checks"] = diagram_to_list(res.verification)
    return out


def diagram_to_list(rep: DiagramReport) -> list:
    return [
        {
            "character": c.index,
            "passed": c.passed,
            "checked_through": None if c.checked_through == INF else int(c.checked_through),
            "first_failure": c.first_failure,
        }
        for c in rep.checks
    ]


def result_from_dict(doc, germ: MorphismGerm) -> MonomializationResult:
    """Rebuild the parts of a stored result that verification needs."""
    from .logjac import augment_to_equal_dim

    try:
        F = augment_to_equal_dim(germ).germ
        model = F.model
        fld = model.field
        E = tuple(tuple(_int_list(row, "E")) for row in doc["E"])
        lambdas = tuple(parse_scalar(x, fld, f"lambda[{k}]") for k, x in enumerate(doc["lambda"]))
        eps = []
        for k, e in enumerate(doc["epsilon"]):
            spec = parse_pullback({"terms": e["terms"], "precision": e.get("precision")}, fld, f"epsilon[{k}]")
            eps.append(spec.build(model))
        t = tuple(parse_scalar(x, fld, f"t[{k}]") for k, x in enumerate(doc.get("t", [])))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"stored result is missing {exc}", str(exc)) from None
    if len(E) != F.n or len(eps) != F.n or len(lambdas) != F.n:
        raise ValidationError("stored result does not match the scenario's dimensions", len(E))
    g = ToricMorphismData(F.m, F.n, tuple(tuple(r) for r in doc.get("g", E)))
    return MonomializationResult(
        germ=F,
        appended=tuple(tuple(v) for v in doc.get("appended", [])),
        mode=doc.get("mode", RATIONAL_RESIDUE),
        E=E,
        exponents=(),
        lambdas=lambdas,
        units=(),
        w=(),
        epsilon=tuple(eps),
        g=g,
        t=TranslationPoint(t),
        jacobian_at_point=(),
    )


__all__ = [
    "SCHEMA_VERSION",
    "Assertions",
    "PullbackSpec",
    "Scenario",
    "parse_scenario",
    "serialize_scenario",
    "scenario_from_dict",
    "scenario_to_dict",
    "result_to_dict",
    "result_from_dict",
    "dump_scalar",
    "parse_scalar",
    "dumps",
]
