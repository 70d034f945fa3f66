"""Monomialization of a log smooth germ and its machine verification.

Given f*(c_j) = u_j z^{e_j} with det J(x) != 0, produce an invertible
exponent matrix E, constants lambda_j, units w_j and eps_i with

    f*(c_j) = lambda_j w_j z^{E_j},     w_j = prod_i eps_i^{E_ji},

so that after the coordinate change z_i -> eps_i z_i and the translation
c_j -> c_j / lambda_j the germ becomes the toric map c_j -> z^{E_j}.  The
etale cover on which the eps_i live is never materialized: everything is
checked as an identity of truncated series.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from gmpy2 import mpq

from . import intlat
from .errors import (
    BadConstantTerm,
    Condition1Violated,
    InvariantBreach,
    NotLogSmooth,
    ResidueFieldHypothesisViolated,
    RootExtractionFailed,
    SingularMatrix,
    ValidationError,
)
from .fields import FieldSpec, NoRoot, Scalar, _divisors, nth_root, poly_eval, rational_roots, rational_value
from .logjac import (
    MorphismGerm,
    augment_to_equal_dim,
    field_det,
    is_log_smooth,
    log_jacobian,
)
from .series import INF, LocalModel, MonomialUnitForm, Series, extract_monomial_unit
from .toric import (
    AffineMonoid,
    ToricMorphismData,
    ToricPoint,
    TranslationPoint,
    is_regular_toric_morphism,
    translation_from_lambda,
)

__all__ = [
    "MonomialUnitForm",
    "MonomializationResult",
    "DiagramReport",
    "extract_monomial_unit",
    "hensel_units",
    "solve_constant_system",
    "monomialize_pipeline",
    "verify_diagram",
    "lemma3_etale_check",
    "certify_counterexample",
]

RATIONAL_RESIDUE = "rational_residue"
ROOT_CAPABLE = "root_capable"
MODES = (RATIONAL_RESIDUE, ROOT_CAPABLE)


def hensel_units(E, w) -> list[Series]:
    """Units eps with prod_i eps_i^{E[j][i]} = w_j, each w_j(x) = 1.

    In characteristic 0 the solution is eps = exp(E^{-1} log w).
    """
    E = intlat.as_matrix(E)
    d, inv = intlat.det_and_inverse(E)
    if d == 0:
        raise SingularMatrix("exponent matrix is singular", E)
    w = list(w)
    if len(w) != len(E):
        raise ValidationError("need one unit per row of E", len(w))
    logs = []
    for j, wj in enumerate(w):
        if wj.constant_term != wj.model.field.one:
            raise BadConstantTerm(f"w_{j + 1}(x) must be 1", wj.value_at_point())
        logs.append(wj.log())
    model = w[0].model
    out = []
    for row in inv:
        acc = model.zero()
        for coef, lg in zip(row, logs):
            if coef:
                acc = acc + lg.scale(mpq(coef.numerator, coef.denominator))
        out.append(acc.exp())
    return out


def monomial_product(factors, exponents, model: LocalModel) -> Series:
    """prod_i factors[i] ** exponents[i] (negative exponents allowed)."""
    acc = model.one()
    for s, e in zip(factors, exponents):
        if e:
            acc = acc * (s ** e)
    return acc


def _scalar_product(values, exponents, field: FieldSpec) -> Scalar:
    acc = field(1)
    for v, e in zip(values, exponents):
        if e:
            acc = acc * v ** e
    return acc


def solve_constant_system(E, b, field: FieldSpec):
    """Constants c with prod_i c_i^{E[j][i]} = b_j, via the Smith form of E.

    With U E V = D, set b'_k = prod_j b_j^{U[k][j]}, take delta_k a d_k-th
    root of b'_k and return c_i = prod_k delta_k^{V[i][k]}.
    """
    E = intlat.as_matrix(E)
    D, U, V = intlat.snf(E)
    n = len(E)
    deltas = []
    for k in range(n):
        dk = D[k][k]
        if dk == 0:
            raise SingularMatrix("exponent matrix is singular", E)
        target = _scalar_product(b, U[k], field)
        root = nth_root(target, dk)
        if isinstance(root, NoRoot):
            raise RootExtractionFailed(
                f"x^{dk} = {target} has no solution in the residue field"
                + ("" if root.certified else " (bounded search only)"),
                root,
            )
        deltas.append(root)
    c = [_scalar_product(deltas, V[i], field) for i in range(n)]
    for j in range(n):
        if _scalar_product(c, E[j], field) != b[j]:
            raise InvariantBreach("constant system solution does not check", (c, b))
    return c


@dataclass(frozen=True)
class CharacterCheck:
    index: int  # 1-based target character
    passed: bool
    checked_through: int | float
    first_failure: int | None


@dataclass(frozen=True)
class DiagramReport:
    order: int
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def checked_through(self):
        return min((c.checked_through for c in self.checks), default=self.order)


@dataclass(frozen=True)
class MonomializationResult:
    germ: MorphismGerm  # after augmentation to n = m
    appended: tuple
    mode: str
    E: tuple
    exponents: tuple  # sharp exponents found by extraction (split basis)
    lambdas: tuple
    units: tuple  # u_j adapted to the free columns of E
    w: tuple
    epsilon: tuple
    g: ToricMorphismData
    t: TranslationPoint
    jacobian_at_point: tuple
    verification: DiagramReport | None = None

    @property
    def n(self) -> int:
        return len(self.E)


def monomialize_pipeline(f: MorphismGerm, mode: str = RATIONAL_RESIDUE) -> MonomializationResult:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    verdict = is_log_smooth(f)
    if not verdict.smooth:
        raise NotLogSmooth(f"log Jacobian at x has rank {verdict.rank} < {f.n}", verdict.rank)
    aug = augment_to_equal_dim(f)
    F = aug.germ
    model = F.model
    field = model.field
    m, r = model.m, model.r
    jx = log_jacobian(F).at_point
    forms = [extract_monomial_unit(p) for p in F.pullbacks]
    first = [list(fm.exponent[:r]) for fm in forms]
    E = intlat.complete_columns(first if r else [[] for _ in range(m)], m)
    for j in range(m):
        for i in range(r):
            if jx[j][i] != E[j][i]:
                raise InvariantBreach(
                    "first r columns of J(x) differ from those of E", (j + 1, i + 1)
                )
    units = []
    for fm, row in zip(forms, E):
        tail = row[r:]
        u = fm.unit
        if any(tail):
            u = u * model.z_monomial((0,) * r + tuple(-x for x in tail))
        units.append(u)

    if mode == RATIONAL_RESIDUE:
        lambdas = []
        for j, u in enumerate(units):
            lam = u.value_at_point()
            if F.base_field != field and rational_value(lam) is None:
                raise ResidueFieldHypothesisViolated(
                    f"u_{j + 1}(x) = {lam} does not lie in the base field", lam
                )
            lambdas.append(lam)
        w = [u.scale(field.inv(lam.c)) for u, lam in zip(units, lambdas)]
        eps = hensel_units(E, w)
    else:
        lambdas = [field(1)] * m
        w = units
        consts = [u.value_at_point() for u in units]
        c = solve_constant_system(E, consts, field)
        normalized = [u.scale(field.inv(b.c)) for u, b in zip(units, consts)]
        eps = [e.scale(ci) for e, ci in zip(hensel_units(E, normalized), c)]

    basis = model.split.matrix()
    g = ToricMorphismData(m, m, tuple(tuple(intlat.matvec(basis, row)) for row in E))
    local_g = ToricMorphismData(r, m, tuple(tuple(row[:r]) for row in E))
    regular, witness = is_regular_toric_morphism(local_g, model.sharp_monoid, F.target_monoid)
    if not regular:
        raise ValidationError(
            "pullbacks do not define a morphism into the target toric variety", witness
        )
    t = translation_from_lambda(lambdas, F.base_field)
    result = MonomializationResult(
        germ=F,
        appended=aug.appended,
        mode=mode,
        E=tuple(tuple(row) for row in E),
        exponents=tuple(fm.exponent for fm in forms),
        lambdas=tuple(lambdas),
        units=tuple(units),
        w=tuple(w),
        epsilon=tuple(eps),
        g=g,
        t=t,
        jacobian_at_point=verdict_matrix(jx),
    )
    report = verify_diagram(F, result)
    if not report.passed:
        raise InvariantBreach("commutativity check failed", report)
    return dataclasses.replace(result, verification=report)


def verdict_matrix(jx):
    return tuple(tuple(row) for row in jx)


def verify_diagram(f: MorphismGerm, res: MonomializationResult) -> DiagramReport:
    """Check lambda_j^{-1} f*(c_j) = (prod_i eps_i^{E_ji}) z^{E_j} for every j."""
    if f.n != res.n:
        f = augment_to_equal_dim(f).germ
    model = f.model
    N = model.order
    checks = []
    inverses = {}
    for j, (pull, row, lam) in enumerate(zip(f.pullbacks, res.E, res.lambdas)):
        lhs = pull.scale(model.field.inv(model.field.raw(lam)))
        rhs = model.one()
        for i, e in enumerate(row):
            if e > 0:
                rhs = rhs * res.epsilon[i] ** e
            elif e < 0:
                if i not in inverses:
                    inverses[i] = res.epsilon[i].inverse()
                rhs = rhs * inverses[i] ** (-e)
        rhs = rhs * model.z_monomial(row)
        through = min(N, lhs.prec, rhs.prec)
        bad = lhs.first_difference(rhs, up_to=through)
        if bad is not None:
            # report the weight at which the units disagree, not the full series
            bad -= model.weight(tuple(row[: model.r]) + (0,) * (model.m - model.r))
        checks.append(CharacterCheck(j + 1, bad is None, through, bad))
    return DiagramReport(N, tuple(checks))


# -- etale criterion -----------------------------------------------------------


@dataclass(frozen=True)
class EtaleVerdict:
    etale: bool
    jacobian_at_point: tuple
    det: Scalar
    lower_left_zero: bool
    unit_block_det: Scalar  # det of the last (m-r) x (m-r) block of J(x)
    claim2_det: Scalar  # det of that block rescaled by x'_i(x) / x_j(x)
    direct_partials_det: Scalar  # det (d x'_i / d x_j)(x), i, j > r


def lemma3_etale_check(rho_model: LocalModel, psi: MorphismGerm) -> EtaleVerdict:
    """Etaleness of psi: X -> V at x, where rho is the identity chart.

    ``psi.pullbacks[i]`` is psi*(z_{i+1}) for the split basis z of
    ``rho_model``; rho*(z_i) = z_i.
    """
    model = rho_model
    if psi.model != model:
        raise ValidationError("psi must be defined on the chart's local model", None)
    m, r = model.m, model.r
    if psi.n != m:
        raise ValidationError("psi must pull back every basis character", psi.n)
    field = model.field
    for i, p in enumerate(psi.pullbacks):
        want = tuple(int(k == i) for k in range(r))
        got = extract_monomial_unit(p).exponent[:r]
        if got != want:
            raise Condition1Violated(
                f"rho*(z_{i + 1}) / psi*(z_{i + 1}) is not a unit", (i + 1, got)
            )
    verdict = is_log_smooth(psi)
    if not verdict.smooth:
        raise NotLogSmooth("psi is not log smooth at x", verdict.rank)
    jx = verdict.jacobian_at_point
    full_det = field_det(jx, field)
    lower_left_zero = all(jx[i][j].is_zero() for i in range(r, m) for j in range(r))
    block = [[jx[i][j] for j in range(r, m)] for i in range(r, m)]
    block_det = field_det(block, field)
    # rows times x'_i(x), columns divided by x_j(x)
    x_vals = model.unit_values
    xp_vals = [psi.pullbacks[i].value_at_point() for i in range(r, m)]
    rescaled = [
        [block[a][b] * xp_vals[a] / x_vals[b] for b in range(m - r)] for a in range(m - r)
    ]
    claim2 = field_det(rescaled, field)
    partials = []
    for i in range(r, m):
        orbit = psi.pullbacks[i].restrict_to_orbit()
        row = []
        for j in range(r, m):
            key = tuple(int(k == j) for k in range(m))
            row.append(orbit.coefficient(key) / x_vals[j - r])
        partials.append(row)
    direct = field_det(partials, field)
    if claim2 != direct:
        raise InvariantBreach("rescaled block determinant disagrees with direct partials", (claim2, direct))
    etale = (not full_det.is_zero()) and lower_left_zero and not block_det.is_zero()
    return EtaleVerdict(etale, jx, full_det, lower_left_zero, block_det, claim2, direct)


# -- the counterexample over Q(i) -------------------------------------------


def remark2_y(model: LocalModel) -> Series:
    """y = i (1 - x)^{1/2}, the branch of y^2 = x - 1 through y = i."""
    i = model.field.gen()
    coeffs = [mpq(1)]
    for k in range(1, model.order + 1):
        coeffs.append(coeffs[-1] * (mpq(1, 2) - k + 1) / k)
    return model.series(
        [((k,), i * (c * (-1) ** k)) for k, c in enumerate(coeffs)], precision=model.order
    )


def remark2_germ(order: int = 12) -> MorphismGerm:
    """f: X -> A^1, z = y x^4, on X: y^2 = x - 1, at the point x = 0, y = i.

    x is an etale coordinate at that point, so the completed local ring is
    Q(i)[[x]].
    """
    Qi = FieldSpec.number_field((1, 0, 1), "i")
    line = AffineMonoid(1, [(1,)], labels=("x",))
    model = LocalModel(ToricPoint(line, (), (), Qi), order)
    pull = remark2_y(model).times_sharp_monomial((4,))
    return MorphismGerm(model, AffineMonoid(1, [(1,)], labels=("z",)), [pull], FieldSpec.rationals())


def _gaussian_fourth_power():
    """(p + q i)^4 = A + B i as dicts {(deg_p, deg_q): coefficient}."""
    re, im = {(0, 0): 1}, {}
    for _ in range(4):
        # (re + im i)(p + q i) = (re p - im q) + (re q + im p) i
        new_re, new_im = {}, {}
        for (a, b), c in re.items():
            new_re[(a + 1, b)] = new_re.get((a + 1, b), 0) + c
            new_im[(a, b + 1)] = new_im.get((a, b + 1), 0) + c
        for (a, b), c in im.items():
            new_re[(a, b + 1)] = new_re.get((a, b + 1), 0) - c
            new_im[(a + 1, b)] = new_im.get((a + 1, b), 0) + c
        re = {k: v for k, v in new_re.items() if v}
        im = {k: v for k, v in new_im.items() if v}
    return re, im


def certify_counterexample(order: int = 12) -> dict:
    """Structured certificate that the residue-field hypothesis is needed."""
    checks = {}
    f = remark2_germ(order)
    y = remark2_y(f.model)
    x = f.model.z(1)
    rel = (y * y - x + 1).truncate(y.prec)
    verdict = is_log_smooth(f)
    jx = [[str(v) for v in row] for row in verdict.jacobian_at_point]
    checks["log_smooth"] = {
        "passed": verdict.smooth and jx == [["4"]] and rel.is_zero(),
        "jacobian_at_point": jx,
        "y_at_point": str(y.value_at_point()),
        "curve_equation_holds_through": y.prec,
    }

    re, im = _gaussian_fourth_power()
    quartic = {f"p^{a} q^{b}": c for (a, b), c in sorted(re.items(), reverse=True)}
    # alpha * beta^4 = i forces Re(beta^4) = 0; with t = (p/q)^2 that is t^2 - 6t + 1
    # coefficients low to high in t
    in_t = [re.get((4 - 2 * k, 2 * k), 0) for k in range(3)][::-1]
    structural = set(re) == {(4, 0), (2, 2), (0, 4)}
    cands = sorted({mpq(s * p, q) for p in _divisors(in_t[0]) for q in _divisors(in_t[-1]) for s in (1, -1)})
    cand_values = {str(c): str(poly_eval(in_t, c)) for c in cands}
    roots = rational_roots(in_t)
    axis_cases = re.get((4, 0)) == 1 and re.get((0, 4)) == 1
    Qi = f.model.field
    root_check = nth_root(Qi.gen(), 4)
    checks["no_alpha_beta"] = {
        "passed": structural and axis_cases and not roots and isinstance(root_check, NoRoot) and root_check.certified,
        "real_part_of_quartic": quartic,
        "imaginary_part_of_quartic": {f"p^{a} q^{b}": c for (a, b), c in sorted(im.items(), reverse=True)},
        "reduced_polynomial_in_t": "t^2 - 6t + 1" if in_t == [1, -6, 1] else str(in_t),
        "rational_root_candidates": cand_values,
        "rational_roots": [str(t) for t in roots],
    }

    outcomes = {}
    for mode, expected in ((RATIONAL_RESIDUE, ResidueFieldHypothesisViolated), (ROOT_CAPABLE, RootExtractionFailed)):
        try:
            monomialize_pipeline(f, mode)
            outcomes[mode] = {"passed": False, "error": None}
        except expected as exc:
            outcomes[mode] = {"passed": True, "error": exc.kind, "witness": str(exc.witness.value if isinstance(exc.witness, NoRoot) else exc.witness)}
    checks["pipeline_fails"] = {
        "passed": all(o["passed"] for o in outcomes.values()),
        **outcomes,
    }
    return {"passed": all(c["passed"] for c in checks.values()), "checks": checks}
