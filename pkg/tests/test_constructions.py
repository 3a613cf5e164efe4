from fractions import Fraction

import pytest

from gdbialg.algcore import Element, LawId, LinearMap, law_check
from gdbialg.constructions import (
    AdditiveMap, BadCharacteristic, CocycleF, FamilyConstraintViolation, FamilySpec, GroupSpec, GroupSpecViolation,
    UnknownCondition, bilinear_form, bracket_family, circ_b, fp_irreducible_module, fp_simple_novikov,
    gd_commutator, gd_lie_poisson, gd_two_derivations, gd_witt, indexed_algebra, module_M_lambda,
    novikov_from_derivation, phi_from_phi0, t45_product, theta_from_maps, truncated_polynomials,
    validate_side_conditions,
)
from gdbialg.scalars import GF, QQ

Z = GroupSpec.integers()


def u(*coords, i=0):
    return (tuple(coords), i)


def el(label, c=1, F=QQ):
    return Element(F, {label: c})


# ---------------------------------------------------------------- Novikov from a derivation


def test_novikov_from_t_ddt():
    A = truncated_polynomials(QQ, 3)
    D = LinearMap(QQ, lambda k: {k: k}, "t d/dt", A.carrier)
    N = novikov_from_derivation(A, D, 0)
    assert N.on_labels(1, 1) == el(2)


def test_novikov_from_derivation_kernel_vanishes():
    A = truncated_polynomials(QQ, 3)
    D = LinearMap(QQ, lambda k: {k: k}, "t d/dt", A.carrier)
    N = novikov_from_derivation(A, D, 0)
    assert N.on_labels(2, 0) == Element.zero(QQ)


def test_novikov_on_graded_integers():
    A = indexed_algebra("ADeltaFJ", {"group": Z})
    N = novikov_from_derivation(A.dot, A.derivations["d"], 0)
    assert N.on_labels(u(2), u(3)) == el(u(5), 3)
    assert law_check(LawId.NOVIKOV, N).passed


# ---------------------------------------------------------------- finite families


def test_fp_square_of_middle_vector():
    A = fp_simple_novikov(3, 1, 0, 0)
    assert A.on_labels(0, 0) == el(0, F=GF(3))


def test_fp_b_term():
    A = fp_simple_novikov(3, 1, 0, 1)
    assert A.on_labels(-1, -1) == el(1, F=GF(3))


@pytest.mark.parametrize("p,k", [(3, 1), (5, 1), (3, 2)])
def test_fp_edge_product(p, k):
    top = p ** k - 2
    A = fp_simple_novikov(p, k, 0, 0)
    assert A.on_labels(-1, top) == el(top - 1, F=GF(p))


def test_fp_requires_odd_prime():
    with pytest.raises((BadCharacteristic, ValueError)):
        fp_simple_novikov(2, 1)


def test_fp_module_left_action():
    M = fp_irreducible_module(3, 1, 0, 0, 1)
    assert M.left.on_labels(0, 0) == Element(GF(3), {0: 1, 1: 2})


def test_fp_module_right_action():
    M = fp_irreducible_module(3, 1, 1, 0, 1)
    assert M.right.on_labels(-1, 0) == Element(GF(3), {-1: 1, 1: 1})


def test_fp_module_lambda_zero_a_zero_lawful():
    M = fp_irreducible_module(5, 1, 0, 1, 0)
    assert law_check(LawId.MODULE_NOVIKOV, M).passed and not M.flags


def test_fp_module_lambda_zero_a_one_flagged():
    M = fp_irreducible_module(3, 1, 1, 0, 0)
    assert M.flags


# ---------------------------------------------------------------- indexed algebras


def test_graded_derivative_with_J():
    A = indexed_algebra("ADeltaFJ", {"J": "naturals"})
    assert A.derivations["d"](el(u(2, i=1))) == Element(QQ, {u(2, i=1): 2, u(2, i=0): 1})


def test_gamma_second_derivation():
    A = indexed_algebra("GammaJ", {"J": "zero"})
    assert A.derivations["d2"](el(u(1, 3))) == el(u(1, 3), 3)


def test_poisson_bracket_x_p():
    P = indexed_algebra("PoissonXY")
    assert P.bracket.on_labels((1, 0), (0, 1)) == el((0, 0))


def test_cocycle_validation():
    G = GroupSpec.lattice2()
    rep = validate_side_conditions("Cocycle23", {"group": G, "f": CocycleF(G)})
    assert rep.passed


def test_group_validation():
    with pytest.raises(GroupSpecViolation):
        GroupSpec(QQ, [0])
    with pytest.raises(GroupSpecViolation):
        GroupSpec(QQ, [1, (1, 2)])


def test_group_over_prime_field_is_exact():
    G = GroupSpec(GF(5), [1, 2])
    assert G.rank == 1 and len(G.window(10)) == 5


# ---------------------------------------------------------------- modules M(lambda)


def test_module_lambda_action():
    M = module_M_lambda(Z, "zero", 0, Fraction(1, 2))
    assert M.left.on_labels((1, 0), (Fraction(3, 2), 0)) == el((Fraction(5, 2), 0), Fraction(3, 2))


def test_module_lambda_zero_is_regular():
    M = module_M_lambda(Z, "zero", 0, 0)
    assert law_check(LawId.MODULE_NOVIKOV, M).passed
    assert M.carrier.contains((0, 0)) and M.carrier.contains((2, 0))


def test_module_lambda_support_in_coset():
    M = module_M_lambda(Z, "zero", 1, Fraction(1, 3))
    for a in range(-2, 3):
        for b in range(-2, 3):
            r = M.left.on_labels((a, 0), (b + Fraction(1, 3), 0))
            assert all(x[0] == a + b + Fraction(1, 3) for x in r.terms)


# ---------------------------------------------------------------- GD bialgebras


def test_commutator_of_commutative_is_zero():
    g = gd_commutator(truncated_polynomials(QQ, 3))
    assert all(not g.bracket.on_labels(a, b) for a in range(3) for b in range(3))


def test_commutator_of_circ0():
    g = gd_commutator(circ_b(Z, "zero", 0))
    assert g.bracket.on_labels(u(1), u(3)) == el(u(4), 2)


def test_commutator_of_fp():
    g = gd_commutator(fp_simple_novikov(3, 1, 0, 0))
    assert g.bracket.on_labels(-1, 1) == el(0, F=GF(3))


def test_witt_dimension_and_products():
    w = gd_witt(truncated_polynomials(QQ, 3))
    assert w.carrier.dim == 5
    # D0 = t d/dt and D1 = t^2 d/dt, recorded by their images
    assert w.meta["derivations"][0]["t"] == "t" and w.meta["derivations"][1]["t"] == "t^2"
    assert w.circ.on_labels(("d", 0), ("a", 1)) == el(("d", 1))
    assert all(not w.circ.on_labels(x, ("d", k)) for x in w.carrier.order for k in (0, 1))


def test_lie_poisson_products():
    g = gd_lie_poisson(indexed_algebra("PoissonXY"), xi=-2)
    assert g.circ.on_labels((1, 0), (0, 1)) == el((1, 1), -1)
    assert g.circ.on_labels((0, 0), (0, 0)) == el((0, 0), -2)


def test_lie_poisson_xi_derivation():
    P = indexed_algebra("PoissonXY")
    ctx = {"dot": P.dot, "bracket": P.bracket, "carrier": P.carrier, "derivation": P.derivations["E"], "xi": -2}
    assert law_check(LawId.XI_DERIVATION, ctx).passed


def test_two_derivations_circ():
    g = gd_two_derivations(indexed_algebra("GammaJ", {"J": "zero"}), "V34")
    assert g.circ.on_labels(u(1, 0), u(0, 1)) == el(u(1, 1))


def test_two_derivations_killed_pair():
    g = gd_two_derivations(indexed_algebra("GammaJ", {"J": "zero"}), "V34")
    assert not g.bracket.on_labels(u(1, 0), u(2, 0))


def test_v35_b0_circ():
    A = indexed_algebra("GammaJ", {"J": "zero"})
    g = gd_two_derivations(A, "V35", 0)
    assert g.circ.on_labels(u(1, 1), u(2, 5)) == el(u(3, 6), 2)


@pytest.mark.parametrize("variant,b", [("V34", 0), ("V35", 0), ("V35", 1)])
def test_two_derivation_laws(variant, b):
    g = gd_two_derivations(indexed_algebra("GammaJ", {"J": "zero"}), variant, b)
    W = g.carrier.default_window(1)
    assert all(law_check(law, g, W).passed for law in ("skew", "jacobi", "novikov", "gd_compat"))


# ---------------------------------------------------------------- families


def test_f43_bracket():
    g = bracket_family(FamilySpec("F43", Z))
    assert g.bracket.on_labels(u(1), u(2)) == el(u(3))


def test_f44_bracket():
    g = bracket_family(FamilySpec("F44", Z, b=Fraction(1, 2), phi=AdditiveMap(Z, [1])))
    assert g.bracket.on_labels(u(0), u(1)) == el(u(1), Fraction(1, 2))


def test_f44_rejects_b_in_group():
    with pytest.raises(FamilyConstraintViolation):
        bracket_family(FamilySpec("F44", Z, b=1, phi=AdditiveMap(Z, [1])))


def test_f49_theta_zero_is_phi_part():
    G2 = GroupSpec(QQ, [1, Fraction(1, 2)])
    p1 = AdditiveMap(G2, [1, 2])
    g = bracket_family(FamilySpec("F49", G2, b=(2, -1), phi=p1))
    x, y = ((1, 0), 0), ((0, 1), 0)
    av, cv, bv = 1, Fraction(1, 2), Fraction(3, 2)
    want = (av + bv) * p1((0, 1)) - (cv + bv) * p1((1, 0))
    assert g.bracket.on_labels(x, y) == el(((1, 1), 0), want)


def test_t45_commutator_identity():
    prod = t45_product(Z, 3)
    assert prod.on_labels(u(1), u(2)) == el(u(3), 5)


def test_phi_from_phi0_passes_side_conditions():
    G2 = GroupSpec(QQ, [1, Fraction(1, 2)])
    rep = validate_side_conditions("Phi46_47", {"group": G2, "phi": phi_from_phi0(AdditiveMap(G2, [2, -1])),
                                                "a": 1}, G2.window(1))
    assert rep.passed


def test_skew_bilinear_a0_passes():
    G2 = GroupSpec(QQ, [1, Fraction(1, 2)])
    rep = validate_side_conditions("Phi46_47", {"group": G2, "phi": bilinear_form(G2, [[0, 1], [-1, 0]]), "a": 0},
                                   G2.window(1))
    assert rep.passed


def test_rank3_bilinear_a1_fails_cyclic_condition():
    G3 = GroupSpec(QQ, [1, Fraction(1, 2), Fraction(1, 3)])
    phi = bilinear_form(G3, [[0, 1, 0], [-1, 0, 1], [0, -1, 0]])
    rep = validate_side_conditions("Phi46_47", {"group": G3, "phi": phi, "a": 1}, G3.window(1))
    assert not rep.passed and rep.detail == "cyclic term times (S0 - a)"


def test_theta_from_maps_passes():
    G2 = GroupSpec(QQ, [1, Fraction(1, 2)])
    p1, p2 = AdditiveMap(G2, [1, 2]), AdditiveMap(G2, [0, 1])
    theta = theta_from_maps(p1, p2, (2, -1))
    rep = validate_side_conditions("Theta410_411", {"group": G2, "theta": theta, "b": (2, -1)}, G2.window(1))
    assert rep.passed


def test_unknown_condition():
    with pytest.raises(UnknownCondition):
        validate_side_conditions("Nope", {"group": Z})
