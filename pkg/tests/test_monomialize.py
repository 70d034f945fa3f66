import dataclasses

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from toroidal import intlat
from toroidal.errors import (
    Condition1Violated,
    NotLogSmooth,
    NotMonomialTimesUnit,
    ResidueFieldHypothesisViolated,
    RootExtractionFailed,
    SingularMatrix,
)
from toroidal.logjac import MorphismGerm, log_jacobian
from toroidal.monomialize import (
    ROOT_CAPABLE,
    extract_monomial_unit,
    hensel_units,
    lemma3_etale_check,
    certify_counterexample,
    monomial_product,
    monomialize_pipeline,
    remark2_germ,
    solve_constant_system,
    verify_diagram,
)
from toroidal.series import LocalModel
from toroidal.toric import ToricPoint, is_regular_toric_morphism

from strategies import (
    QI,
    claim2_oracle,
    QQ,
    free_monoid,
    model_zoo,
    random_character_element,
    random_germ,
    random_one_unit,
    random_series,
    seeded,
)


def plane(order=12, face=(), values=()):
    return LocalModel(ToricPoint(free_monoid(2), face, values, QQ), order)


def germ(model, pulls):
    return MorphismGerm(model, free_monoid(len(pulls)), pulls)


def plane_pair(order=12):
    M = plane(order)
    z1, z2 = M.z(1), M.z(2)
    return germ(M, [(1 + z1) * z1 * z2, (2 + z2) * z1 * z2 ** 2])


# -- extraction ----------------------------------------------------------------


def test_extract_examples():
    M = plane(8)
    z1, z2 = M.z(1), M.z(2)
    form = extract_monomial_unit(z1 * z2 + z1 ** 2 * z2)
    assert form.exponent == (1, 1) and form.unit == 1 + z1
    form = extract_monomial_unit(2 + z1)
    assert form.exponent == (0, 0) and form.unit == 2 + z1
    with pytest.raises(NotMonomialTimesUnit):
        extract_monomial_unit(z1 + z2)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 4))
def test_reassembly(seed, which):
    rng = seeded(seed)
    M = model_zoo(order=10)[which]
    y = random_character_element(rng, M, M.point.monoid) * random_series(rng, M, unit=True)
    try:
        form = extract_monomial_unit(y)
    except NotMonomialTimesUnit:
        return
    assert form.unit.is_unit()
    back = form.reassemble()
    assert back.first_difference(y, up_to=min(M.order, back.prec)) is None


# -- Hensel lifting -------------------------------------------------------------


def test_hensel_square_root():
    M = plane(12, face=(1,), values=(1,))
    s = M.s(2)
    (eps,) = hensel_units([[2]], [1 + s])
    coeffs = [mpq(1)]
    for k in range(1, 13):
        coeffs.append(coeffs[-1] * (mpq(1, 2) - k + 1) / k)
    assert eps == M.series([((0, k), c) for k, c in enumerate(coeffs)])


def test_hensel_identity_and_pair():
    M = plane(12)
    w = [1 + M.z(1), 1 + M.z(2)]
    assert hensel_units([[1, 0], [0, 1]], w) == w
    e1, e2 = hensel_units([[1, 1], [1, 2]], w)
    assert e1 == w[0] ** 2 * w[1].inverse()
    assert e2 == w[1] * w[0].inverse()


def test_hensel_rejects_singular():
    M = plane(4)
    with pytest.raises(SingularMatrix):
        hensel_units([[1, 2], [2, 4]], [M.one(), M.one()])


def _invertible(rng, n, tries=100):
    for _ in range(tries):
        E = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)]
        if intlat.det(E):
            return E
    return intlat.identity(n)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 4))
def test_hensel_solves_the_unit_system(seed, which):
    rng = seeded(seed)
    M = model_zoo(order=8)[which]
    n = rng.randint(1, 3)
    E = _invertible(rng, n)
    w = [random_one_unit(rng, M) for _ in range(n)]
    eps = hensel_units(E, w)
    for row, wj in zip(E, w):
        prod = monomial_product(eps, row, M)
        assert prod.first_difference(wj, up_to=M.order) is None


def test_solve_constant_system():
    assert solve_constant_system([[2]], [QQ(4)], QQ) in ([QQ(2)], [QQ(-2)])
    with pytest.raises(RootExtractionFailed):
        solve_constant_system([[2]], [QQ(-1)], QQ)
    (c,) = solve_constant_system([[2]], [QI(-1)], QI)
    assert c * c == QI(-1)
    c = solve_constant_system([[1, 1], [1, 2]], [QQ(3), QQ(6)], QQ)
    assert c == [QQ(mpq(3, 2)), QQ(2)]


# -- the pipeline ---------------------------------------------------------------


def test_plane_pair_closed_forms():
    f = plane_pair()
    res = monomialize_pipeline(f)
    M = f.model
    assert res.E == ((1, 1), (1, 2))
    assert res.lambdas == (QQ(1), QQ(2))
    assert res.t.values == (QQ(1), QQ(mpq(1, 2)))
    w1, w2 = 1 + M.z(1), 1 + M.z(2).scale(mpq(1, 2))
    assert res.w == (w1, w2)
    assert res.epsilon[0] == w1 ** 2 * w2.inverse()
    assert res.epsilon[1] == w2 * w1.inverse()
    assert res.verification.passed and res.verification.checked_through == 12


def test_identity_germ():
    M = plane()
    res = monomialize_pipeline(germ(M, [M.z(1), M.z(2)]))
    assert res.E == ((1, 0), (0, 1))
    assert res.lambdas == (QQ(1), QQ(1))
    assert all(e == M.one() for e in res.epsilon)
    assert res.t.is_identity()
    assert res.g.lattice_map == ((1, 0), (0, 1))
    assert verify_diagram(res.germ, res).passed


def test_remark2_fails_in_both_modes():
    f = remark2_germ(12)
    with pytest.raises(ResidueFieldHypothesisViolated) as exc:
        monomialize_pipeline(f)
    assert exc.value.witness == QI.gen()
    with pytest.raises(RootExtractionFailed):
        monomialize_pipeline(f, ROOT_CAPABLE)


def test_not_log_smooth():
    M = plane()
    y = M.z(1) * M.z(2)
    with pytest.raises(NotLogSmooth):
        monomialize_pipeline(germ(M, [y, y]))


def test_root_capable_plane_pair():
    f = plane_pair()
    res = monomialize_pipeline(f, ROOT_CAPABLE)
    assert res.lambdas == (QQ(1), QQ(1))
    assert res.verification.passed
    # the constants of eps solve eps1 eps2 = 1, eps1 eps2^2 = 2
    c = [e.value_at_point() for e in res.epsilon]
    assert c == [QQ(mpq(1, 2)), QQ(2)]


def test_tampered_epsilon_fails_at_weight_one():
    f = plane_pair()
    res = monomialize_pipeline(f)
    eps = list(res.epsilon)
    eps[0] = eps[0] + f.model.z(1)
    report = verify_diagram(f, dataclasses.replace(res, epsilon=tuple(eps)))
    assert not report.passed
    first = next(c for c in report.checks if not c.passed)
    assert first.index == 1 and first.first_failure == 1


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_pipeline_invariants(seed):
    rng = seeded(seed)
    f, _ = random_germ(rng, order=8)
    res = monomialize_pipeline(f)
    M = f.model
    assert intlat.det(res.E) != 0
    for u, w, lam in zip(res.units, res.w, res.lambdas):
        assert w.value_at_point() == M.field(1)
        assert w.scale(lam) == u
    for row, wj in zip(res.E, res.w):
        assert monomial_product(res.epsilon, row, M).first_difference(wj, up_to=M.order) is None
    report = verify_diagram(f, res)
    # units lose at most the weight of the monomial they were divided by
    loss = max(M.weight(tuple(row[: M.r]) + (0,) * (M.m - M.r)) for row in res.E)
    assert report.passed and report.checked_through >= M.order - loss
    jx = log_jacobian(res.germ).at_point
    for row, jrow in zip(res.E, jx):
        assert tuple(jrow[: M.r]) == tuple(row[: M.r])
    sharp_rows = tuple(tuple(row[: M.r]) for row in res.E)
    local = dataclasses.replace(res.g, source_rank=M.r, lattice_map=sharp_rows)
    assert is_regular_toric_morphism(local, M.sharp_monoid, res.germ.target_monoid)[0]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_pipeline_is_deterministic(seed):
    f, _ = random_germ(seeded(seed), order=6)
    a, b = monomialize_pipeline(f), monomialize_pipeline(f)
    assert a.E == b.E and a.lambdas == b.lambdas
    assert a.epsilon == b.epsilon and a.t == b.t


# -- etale criterion --------------------------------------------------------------


def test_lemma3_identity_chart():
    M = plane(8)
    v = lemma3_etale_check(M, germ(M, [M.z(1), M.z(2)]))
    assert v.etale and v.det == QQ(1)


def test_lemma3_rescaled_by_one_unit():
    M = plane(8)
    u = 1 + M.z(1)
    v = lemma3_etale_check(M, germ(M, [u * M.z(1), u * M.z(2)]))
    assert v.etale and v.lower_left_zero
    assert v.jacobian_at_point == ((QQ(1), QQ(0)), (QQ(0), QQ(1)))


def test_lemma3_condition1():
    M = plane(8)
    with pytest.raises(Condition1Violated) as exc:
        lemma3_etale_check(M, germ(M, [M.z(1) ** 2, M.z(2)]))
    assert exc.value.witness[0] == 1


def test_lemma3_unit_direction_block():
    # z2 = 2 (1 + s); psi*(z2) = z2 + z2^2 has x'(x) = 6, d x' / d x2 = 5
    M = plane(8, face=(1,), values=(2,))
    z1, z2 = M.z(1), M.z(2)
    v = lemma3_etale_check(M, germ(M, [z1, z2 + z2 * z2]))
    assert v.etale
    assert v.unit_block_det == QQ(mpq(5, 3))
    assert v.claim2_det == v.direct_partials_det == QQ(5)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([0, 1, 2, 4]))
def test_lemma3_block_law(seed, which):
    # basis characters must be regular, so only free monoids here
    rng = seeded(seed)
    M = model_zoo(order=6)[which]
    units = [random_series(rng, M, unit=True, max_weight=2) for _ in range(M.m)]
    psi = MorphismGerm(M, free_monoid(M.m), [u * M.z(i + 1) for i, u in enumerate(units)])
    want = claim2_oracle(M, psi)
    try:
        v = lemma3_etale_check(M, psi)
    except NotLogSmooth:
        assert want.is_zero()
        return
    assert v.lower_left_zero
    assert v.claim2_det == want
    assert v.etale == (not want.is_zero())


# -- counterexample certificate ----------------------------------------------------


def test_certificate():
    cert = certify_counterexample()
    assert cert["passed"]
    checks = cert["checks"]
    assert checks["log_smooth"]["jacobian_at_point"] == [["4"]]
    assert checks["log_smooth"]["y_at_point"] == "i"
    no = checks["no_alpha_beta"]
    assert no["real_part_of_quartic"] == {"p^4 q^0": 1, "p^2 q^2": -6, "p^0 q^4": 1}
    assert no["reduced_polynomial_in_t"] == "t^2 - 6t + 1"
    assert no["rational_root_candidates"] == {"-1": "8", "1": "-4"}
    assert no["rational_roots"] == []
    fails = checks["pipeline_fails"]
    assert fails["rational_residue"]["error"] == "ResidueFieldHypothesisViolated"
    assert fails["root_capable"]["error"] == "RootExtractionFailed"
