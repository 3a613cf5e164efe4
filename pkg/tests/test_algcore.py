from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from gdbialg.algcore import (
    CheckReport, Element, FiniteCarrier, GDBialgebra, LawId, NovikovModule, Table, derivations_of, evaluate_law,
    invariant_closure, is_irreducible, is_simple, law_check, linear_combine, multiply, perturb_entry,
    zero_product,
)
from gdbialg.constructions import (
    direct_sum, fp_irreducible_module, fp_simple_novikov, one_dim_idempotent, truncated_polynomials,
)
from gdbialg.scalars import GF, QQ


def e(F, label, c=1):
    return Element(F, {label: c})


def violator() -> Table:
    C = FiniteCarrier([1, 2], ["e₁", "e₂"])
    return Table(QQ, C, {(1, 1): {2: 1}, (1, 2): {1: 1}})


# ---------------------------------------------------------------- elements


def test_linear_combine_adds_like_terms():
    t = e(QQ, "t")
    assert linear_combine([(2, t), (1, t)]) == e(QQ, "t", 3)


def test_linear_combine_cancels_to_empty_support():
    x = e(QQ, "e")
    r = linear_combine([(1, x), (-1, x)])
    assert not r and r.support() == []


def test_linear_combine_scales_fractions():
    x = Element(QQ, {"u": 2, "v": 4})
    assert linear_combine([(Fraction(1, 2), x)]) == Element(QQ, {"u": 1, "v": 2})


# ---------------------------------------------------------------- products


def test_truncation_kills_top_degree():
    A = truncated_polynomials(QQ, 3)
    assert multiply(A, e(QQ, 1), e(QQ, 2)) == Element.zero(QQ)


def test_fp_product_with_delta_term():
    A = fp_simple_novikov(3, 1, 1, 0)
    assert A.on_labels(-1, 0) == Element(GF(3), {-1: 1, 1: 1})


def test_fp_product_out_of_range_vanishes():
    A = fp_simple_novikov(3, 1, 0, 0)
    assert A.on_labels(1, 1) == Element.zero(GF(3))


# ---------------------------------------------------------------- laws


def test_novikov_on_idempotent():
    assert law_check(LawId.NOVIKOV, one_dim_idempotent()).passed


def test_gd_compat_with_zero_bracket():
    circ = violator()
    g = GDBialgebra(circ.carrier, zero_product(QQ, circ.carrier), circ)
    assert law_check(LawId.GD_COMPAT, g).passed


def test_right_comm_witness():
    A = violator()
    rep = law_check(LawId.RIGHT_COMM, A, [1, 2])
    assert not rep.passed
    assert rep.witness == (1, 1, 2)
    assert rep.lhs == Element.zero(QQ) and rep.rhs == e(QQ, 2)
    assert "e₁, e₁, e₂" in rep.describe()
    lhs, rhs = evaluate_law("right_comm", A, rep.witness)
    assert (lhs, rhs) == (rep.lhs, rep.rhs)


def test_unknown_law():
    with pytest.raises(KeyError):
        LawId.parse("associativityish")


def test_report_json_shape():
    rep = law_check(LawId.RIGHT_COMM, violator())
    js = rep.to_json()
    assert js["verdict"] == "fail" and js["witness"]["args"] == ["e₁", "e₁", "e₂"]
    assert isinstance(rep, CheckReport)


def _random_table(draw, p, n):
    entries = {}
    for i in range(n):
        for j in range(n):
            vec = draw(st.lists(st.integers(0, p - 1), min_size=n, max_size=n))
            entries[(i, j)] = {k: c for k, c in enumerate(vec) if c}
    return Table(GF(p), FiniteCarrier(range(n)), entries)


@st.composite
def small_tables(draw, sparse=True):
    p = draw(st.sampled_from([3, 5]))
    n = draw(st.integers(1, 3))
    T = _random_table(draw, p, n)
    return T


@given(small_tables())
def test_novikov_is_conjunction(T):
    nov = law_check(LawId.NOVIKOV, T).passed
    rc = law_check(LawId.RIGHT_COMM, T).passed
    ls = law_check(LawId.LEFT_SYM, T).passed
    assert nov == (rc and ls)


@given(small_tables(), st.sampled_from(["comm", "assoc", "right_comm", "left_sym", "jacobi", "skew", "novikov"]))
def test_dense_path_matches_generic(T, law):
    fast = law_check(law, T, fast=True)
    slow = law_check(law, T, fast=False)
    assert fast.passed == slow.passed
    if not fast.passed:
        assert fast.witness == slow.witness
        assert (fast.lhs, fast.rhs) == (slow.lhs, slow.rhs)


@given(small_tables(), st.sampled_from(["assoc", "right_comm", "left_sym", "jacobi"]))
def test_witness_reevaluates(T, law):
    rep = law_check(law, T)
    if not rep.passed:
        lhs, rhs = evaluate_law(law, T, rep.witness)
        assert lhs != rhs


@given(small_tables(), st.data())
def test_multiply_is_bilinear(T, data):
    F = T.field
    n = T.carrier.dim
    vec = st.lists(st.integers(0, F.p - 1), min_size=n, max_size=n)
    x, y, z = (T.carrier.element(F, data.draw(vec)) for _ in range(3))
    c = data.draw(st.integers(0, F.p - 1))
    assert multiply(T, x + y.scale(c), z) == multiply(T, x, z) + multiply(T, y, z).scale(c)
    assert multiply(T, z, x + y.scale(c)) == multiply(T, z, x) + multiply(T, z, y).scale(c)


def test_gd_compat_detects_perturbation():
    from gdbialg.constructions import gd_commutator
    g = gd_commutator(fp_simple_novikov(3, 1, 0, 0))
    bad = GDBialgebra(g.carrier, g.bracket, perturb_entry(g.circ, -1, 0, 1))
    rep = law_check(LawId.GD_COMPAT, bad)
    assert not rep.passed
    assert law_check(LawId.GD_COMPAT, bad, fast=False).witness == rep.witness


# ---------------------------------------------------------------- derivations


def test_derivations_of_unital_field():
    assert derivations_of(truncated_polynomials(QQ, 1)) == []


def test_derivations_of_cubic_truncation():
    A = truncated_polynomials(QQ, 3)
    ders = derivations_of(A)
    assert len(ders) == 2
    images = {tuple(tuple(r) for r in D.matrix(A.carrier)) for D in ders}
    # spanned by t d/dt (t -> t, t^2 -> 2t^2) and t^2 d/dt (t -> t^2)
    span_rows = [[m for row in M for m in row] for M in images]
    from gdbialg.algcore import rref
    R, _ = rref(span_rows, QQ)
    t_ddt = [0, 0, 0, 0, 1, 0, 0, 0, 2]
    t2_ddt = [0, 0, 0, 0, 0, 0, 0, 1, 0]
    R2, _ = rref(span_rows + [t_ddt, t2_ddt], QQ)
    assert len(R) == len(R2) == 2


def test_derivations_of_square_truncation():
    assert len(derivations_of(truncated_polynomials(QQ, 2))) == 1


# ---------------------------------------------------------------- closure and decisions


def test_closure_in_zero_algebra():
    C = FiniteCarrier([1, 2], ["e₁", "e₂"])
    Z = Table(QQ, C, {})
    S = invariant_closure([(Z, "left"), (Z, "right")], [e(QQ, 1)], C)
    assert S.dim == 1 and S.contains(e(QQ, 1))


def test_closure_of_fp_generator_is_everything():
    A = fp_simple_novikov(3, 1, 0, 0)
    S = invariant_closure([(A, "left"), (A, "right")], [e(GF(3), 0)], A.carrier)
    assert S.dim == 3


def test_closure_in_truncated_polynomials():
    A = truncated_polynomials(QQ, 3)
    S = invariant_closure([(A, "left")], [e(QQ, 1)], A.carrier)
    assert S.dim == 2 and S.contains(e(QQ, 2)) and not S.contains(e(QQ, 0))


def test_closure_idempotent_and_monotone():
    A = fp_simple_novikov(5, 1, 1, 1)
    acts = [(A, "left")]
    S = invariant_closure(acts, [e(GF(5), 3)], A.carrier)
    assert invariant_closure(acts, S.basis, A.carrier) == S
    T = invariant_closure(acts, [e(GF(5), 3), e(GF(5), 0)], A.carrier)
    assert all(T.contains(x) for x in S.basis)


def test_fp_algebra_is_simple():
    v = is_simple(fp_simple_novikov(3, 1, 0, 0))
    assert v.kind == "Simple" and v.exact and v.tested == 13


def test_zero_algebra_not_simple():
    C = FiniteCarrier([1, 2], ["e₁", "e₂"])
    v = is_simple(Table(QQ, C, {}))
    assert v.kind == "NotSimple" and v.witness.contains(e(QQ, 1)) and v.witness.dim == 1


def test_direct_sum_not_simple():
    A = direct_sum(one_dim_idempotent(), one_dim_idempotent())
    v = is_simple(A)
    assert v.kind == "NotSimple"
    assert v.witness.dim == 1 and v.witness.contains(e(QQ, (0, 0)))


def test_fp_module_irreducible():
    v = is_irreducible(fp_irreducible_module(3, 1, 0, 0, 1))
    assert v.kind == "Irreducible" and v.exact


def test_zero_actions_reducible():
    A = one_dim_idempotent()
    C = FiniteCarrier([1, 2], ["v₁", "v₂"])
    M = NovikovModule(A, C, Table(QQ, C, {}), Table(QQ, C, {}))
    v = is_irreducible(M)
    assert v.kind == "Reducible" and v.witness.contains(e(QQ, 1)) and v.witness.dim == 1


def test_adjoint_of_idempotent_irreducible():
    A = one_dim_idempotent()
    M = NovikovModule(A, A.carrier, A, A)
    assert is_irreducible(M).kind == "Irreducible"
