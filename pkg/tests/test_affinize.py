from hypothesis import given, strategies as st

from gdbialg.affinize import LoopElement, check_loop_jacobi, loop_bracket, loop_product, loop_table
from gdbialg.algcore import Element, FiniteCarrier, GDBialgebra, Table, perturb_entry, zero_product
from gdbialg.constructions import (
    fp_simple_novikov, gd_commutator, gd_witt, one_dim_idempotent, truncated_polynomials, virasoro_gd,
)
from gdbialg.scalars import QQ


def violator_gd():
    C = FiniteCarrier([1, 2], ["e₁", "e₂"])
    circ = Table(QQ, C, {(1, 1): {2: 1}, (1, 2): {1: 1}})
    return GDBialgebra(C, zero_product(QQ, C), circ, "violator")


def test_zero_circ_gives_plain_loop_bracket():
    g = gd_commutator(fp_simple_novikov(3, 1, 0, 0))
    lie = GDBialgebra(g.carrier, g.bracket, zero_product(g.field, g.carrier))
    r = loop_product(lie).on_labels((-1, 2), (1, -1))
    want = Element(g.field, {(lbl, 1): c for lbl, c in g.bracket.on_labels(1, -1).terms.items()})
    assert r == want


def test_virasoro_low_powers():
    v = virasoro_gd()
    x = LoopElement.from_pairs(QQ, [((0, 1), 1)])
    y = LoopElement.from_pairs(QQ, [((0, 2), 1)])
    assert loop_bracket(v, x, y) == Element(QQ, {(0, 2): -1})


def test_equal_arguments_vanish():
    g = gd_witt(truncated_polynomials(QQ, 3))
    for x in g.carrier.order:
        assert not loop_product(g).on_labels((x, 2), (x, 2))


def test_virasoro_table():
    tab = loop_table(virasoro_gd(), 0, 0, range(-2, 3))
    for (j, k), r in tab.items():
        assert r == Element(QQ, {(0, j + k - 1): j - k})


def test_fp_commutator_passes():
    g = gd_commutator(fp_simple_novikov(3, 1, 0, 0))
    assert check_loop_jacobi(g, t_range=(-2, 2)).passed


def test_lie_bracket_with_zero_circ_passes():
    g = gd_commutator(fp_simple_novikov(5, 1, 1, 0))
    lie = GDBialgebra(g.carrier, g.bracket, zero_product(g.field, g.carrier))
    assert check_loop_jacobi(lie, t_range=(-2, 2)).passed


def test_violator_fails_with_witness():
    rep = check_loop_jacobi(violator_gd(), t_range=(-2, 2))
    assert not rep.passed and rep.law == "loop_jacobi"
    assert rep.lhs != rep.rhs and len(rep.witness) == 3


def test_grid_matches_pointwise_on_failures():
    g = gd_commutator(fp_simple_novikov(3, 1, 0, 0))
    bad = GDBialgebra(g.carrier, g.bracket, perturb_entry(g.circ, -1, 0, 1))
    grid = check_loop_jacobi(bad, t_range=(-2, 2))
    point = check_loop_jacobi(bad, t_range=(-2, 2), mode="pointwise")
    assert not grid.passed and grid.witness == point.witness
    assert (grid.lhs, grid.rhs) == (point.lhs, point.rhs)


@st.composite
def small_gd(draw):
    """A random 2-dim circ table with zero bracket over Q."""
    C = FiniteCarrier([0, 1], ["a", "b"])
    entries = {}
    for i in range(2):
        for j in range(2):
            vec = draw(st.lists(st.integers(-1, 1), min_size=2, max_size=2))
            entries[(i, j)] = {k: c for k, c in enumerate(vec) if c}
    return GDBialgebra(C, zero_product(QQ, C), Table(QQ, C, entries))


@given(small_gd())
def test_grid_agrees_with_pointwise(g):
    a = check_loop_jacobi(g, t_range=(-2, 2))
    b = check_loop_jacobi(g, t_range=(-2, 2), mode="pointwise")
    assert a.passed == b.passed
    if not a.passed:
        assert a.witness == b.witness


@given(small_gd(), st.integers(-3, 3), st.integers(-3, 3), st.integers(0, 1), st.integers(0, 1))
def test_loop_bracket_antisymmetric_when_circ_terms_swap(g, j, k, x, y):
    L = loop_product(g)
    lhs = L.on_labels((x, j), (y, k))
    rhs = L.on_labels((y, k), (x, j))
    assert lhs == -rhs


def test_idempotent_loop_passes():
    one = one_dim_idempotent()
    g = GDBialgebra(one.carrier, zero_product(QQ, one.carrier), one)
    assert check_loop_jacobi(g).passed
