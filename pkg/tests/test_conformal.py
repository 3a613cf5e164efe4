from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from gdbialg.algcore import Element, GDBialgebra, Table
from gdbialg.conformal import (
    ClosureViolation, GeneratorFamily, NotInSubalgebra, ZSeries, apply_Y, build_R1, build_R2,
    check_conformal_axioms, compare_structures, cross_check_report, degree_of, from_gd, lift, perturb_structure,
    reexpress_in_generators, res_negative_part, skew_transform,
)
from gdbialg.constructions import GroupSpec, gd_two_derivations, indexed_algebra, virasoro_gd
from gdbialg.scalars import QQ

G = GroupSpec.lattice2()


def ce(d, x, c=1):
    return Element(QQ, {(d, x): c})


def vir():
    return from_gd(virasoro_gd())


def u(a, b):
    return ((a, b), 0)


def test_residue_keeps_negative_powers():
    assert res_negative_part({-2: 1}) == {-2: 1}
    assert res_negative_part({0: 1, 3: 2}) == {}
    assert res_negative_part({-1: 1, 3: 5}) == {-1: 1}


def test_virasoro_generator_series():
    s = vir().series(0, 0)
    assert s.coeff(1) == ce(1, 0) and s.coeff(2) == ce(0, 0, 2)


def test_zero_bialgebra_gives_zero_structure():
    one = virasoro_gd()
    z = GDBialgebra(one.carrier, Table(QQ, one.carrier, {}), Table(QQ, one.carrier, {}))
    S = from_gd(z)
    assert not S.series(0, 0)
    assert check_conformal_axioms(S, [0], 2).passed


def test_translated_first_argument():
    s = apply_Y(vir(), ce(1, 0), ce(0, 0))
    assert s == ZSeries(QQ, {2: ce(1, 0, -1), 3: ce(0, 0, -4)})


def test_translated_second_argument():
    s = apply_Y(vir(), ce(0, 0), ce(1, 0))
    assert s == ZSeries(QQ, {1: ce(2, 0), 2: ce(1, 0, 3), 3: ce(0, 0, 4)})


def test_zero_first_argument():
    assert not apply_Y(vir(), Element.zero(QQ), ce(0, 0))


def test_virasoro_axioms_pass():
    assert check_conformal_axioms(vir(), [0], 2).passed


@pytest.mark.parametrize("c", [0, 1, 3, 4])
def test_skew_residue_identity(c):
    P = perturb_structure(vir(), 0, 0, (0, 2), 0, c - 2)
    rep = check_conformal_axioms(P, [0], 2, laws=("conformal_skew",))
    assert not rep.passed and rep.witness == ((0, 0), (0, 0))
    assert rep.rhs == Element(QQ, {("z", 1, (1, 0)): c - 1, ("z", 2, (0, 0)): c})


def test_degrees():
    assert degree_of(vir(), [0]) == 2
    A = indexed_algebra("GammaJ", {"J": "zero"})
    g = gd_two_derivations(A, "V34")
    assert degree_of(from_gd(g, check=False), A.carrier.default_window(1)) <= 2


coeffs = st.integers(-3, 3)


@given(coeffs, coeffs, coeffs, coeffs, st.integers(0, 2))
def test_apply_Y_linear_and_compatible_with_d_dz(a, b, c, d, m):
    S = vir()
    x = ce(0, 0, a) + ce(1, 0, b)
    y = ce(0, 0, c) + ce(2, 0, d)
    assert apply_Y(S, x.scale(2), y) == apply_Y(S, x, y).scale(2)
    dx = Element(QQ, {(k[0] + 1, k[1]): v for k, v in x.terms.items()})
    assert apply_Y(S, dx, y) == apply_Y(S, x, y).d_dz()


@given(coeffs, coeffs, coeffs)
def test_skew_transform_involution(a, b, c):
    s = ZSeries(QQ, {1: ce(0, 0, a) + ce(1, 0, b), 2: ce(0, 0, c), 3: ce(2, 0, a)})
    assert skew_transform(skew_transform(s)) == s


def test_reexpress_exceptional():
    gens = GeneratorFamily(G, "zero", lambda a: G.value(a)[1] == 0, lambda a: G.value(a)[0] + 2, "R1")
    x = Element(QQ, {(0, u(0, 0)): 2, (1, u(0, 0)): 1})
    r = reexpress_in_generators(x, gens)
    assert r == Element(QQ, {(0, u(0, 0)): 1})


def test_reexpress_rejects_non_multiple():
    gens = GeneratorFamily(G, "zero", lambda a: G.value(a)[1] == 0, lambda a: G.value(a)[0] + 2, "R1")
    with pytest.raises(NotInSubalgebra):
        reexpress_in_generators(Element(QQ, {(0, u(0, 0)): 1}), gens)


def test_reexpress_generic_is_identity():
    gens = GeneratorFamily(G, "zero", lambda a: G.value(a)[1] == 0, lambda a: G.value(a)[0] + 2, "R1")
    x = Element(QQ, {(0, u(1, 1)): 1})
    assert reexpress_in_generators(x, gens) == x


def test_R1_pair_lands_on_exceptional_generator():
    R1 = build_R1(G, radius=1)
    w = R1.w(u(0, 1), u(0, -1))
    assert w == {(0, 1): Element(QQ, {u(0, 0): -1})}


def test_R1_z2_coefficient():
    R1 = build_R1(G, radius=1)
    assert R1.w(u(1, 1), u(2, 1)).get((0, 2)) == Element(QQ, {u(3, 2): 2})


def test_R1_degree_three():
    R1 = build_R1(G, radius=2)
    assert degree_of(R1, R1.carrier.default_window(2)) == 3


def test_R2_exceptional_stratum():
    R2 = build_R2(G, Fraction(1, 2), radius=1)
    assert R2.carrier.render_label(u(0, -1)).startswith("g")
    assert degree_of(R2, R2.carrier.default_window(2)) == 4
    assert degree_of(build_R2(G, 0, radius=1), R2.carrier.default_window(2)) <= 3


def test_R2_b0_coefficients():
    R2 = build_R2(G, 0, radius=1)
    assert R2.w(u(1, 1), u(1, -1)) == {(0, 1): Element(QQ, {u(2, 0): -1})}
    w = R2.w(u(1, 1), u(2, 1))
    assert w[(0, 2)] == Element(QQ, {u(3, 2): 2}) and w[(1, 1)] == Element(QQ, {u(3, 2): 1})


def test_R2_from_gd_convention_does_not_close():
    with pytest.raises(ClosureViolation):
        build_R2(G, Fraction(1, 2), table="from_gd", radius=1)


def test_compare_identical_structures():
    S = vir()
    rep = compare_structures(S, S, [0])
    assert rep["agree"] and rep["discrepancies"] == []


def test_cross_check_itemizes():
    rep = cross_check_report(G, b=1, radius=1)
    sec = rep["sections"]["R1"]
    assert not sec["agree"] and sec["opposite_agrees"]
    assert sec["printed_axioms"]["verdict"] == "fail" and sec["from_gd_axioms"]["verdict"] == "pass"
    first = sec["discrepancies"][0]
    assert set(first) == {"u", "v", "d_power", "z_power", "label", "from_gd", "printed"}
    assert all(it["z_power"] == -1 for it in sec["discrepancies"])


def test_lift_shape():
    assert lift(Element(QQ, {"x": 1}), 2) == Element(QQ, {(2, "x"): 1})
